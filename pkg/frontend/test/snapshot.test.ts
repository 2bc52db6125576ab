import { mkdtempSync, readFileSync, writeFileSync } from 'fs';
import { tmpdir } from 'os';
import { join } from 'path';
import { describe, expect, it } from 'vitest';

import { SnapshotError, readSnapshot } from '../src/snapshot';

const FIXTURES = join(__dirname, 'fixtures');

function tmpFile(content: string): string {
  const dir = mkdtempSync(join(tmpdir(), 'snap-'));
  const p = join(dir, 'snap.txt');
  writeFileSync(p, content);
  return p;
}

describe('readSnapshot', () => {
  it('parses the 1D fixture', () => {
    const snap = readSnapshot(join(FIXTURES, 'snapshot_t0.5.txt'));
    expect(snap.t).toBe(0.5);
    expect(snap.dim).toBe(1);
    expect(snap.cells).toEqual([128]);
    expect(snap.fields.u.length).toBe(128);
    expect(snap.fields.v.length).toBe(128);
    expect(Math.min(...snap.fields.u)).toBeGreaterThanOrEqual(0);
  });

  it('parses the 2D fixture row-major', () => {
    const snap = readSnapshot(join(FIXTURES, 'snapshot_2d.txt'));
    expect(snap.dim).toBe(2);
    expect(snap.cells).toEqual([32, 32]);
    expect(snap.fields.u.length).toBe(1024);
    // centered bump: the max sits mid-domain, row-major index ~ ny/2 * nx + nx/2
    const argmax = snap.fields.u.indexOf(Math.max(...snap.fields.u));
    const iy = Math.floor(argmax / 32);
    const ix = argmax % 32;
    expect(Math.abs(ix - 16)).toBeLessThanOrEqual(1);
    expect(Math.abs(iy - 16)).toBeLessThanOrEqual(1);
  });

  it('rejects truncated files', () => {
    const full = readFileSync(join(FIXTURES, 'snapshot_t0.5.txt'), 'utf8');
    const lines = full.split('\n');
    const p = tmpFile(lines.slice(0, 60).join('\n') + '\n');
    expect(() => readSnapshot(p)).toThrowError(/has \d+ values, expected 128/);
  });

  it('rejects dim/cell-count mismatch', () => {
    const p = tmpFile('t 0\ndim 2\ncells 8\nspacing 0.125 0.125\nfield u\n');
    expect(() => readSnapshot(p)).toThrowError(/cell counts/);
  });

  it('rejects missing field sections', () => {
    const vals = Array.from({ length: 8 }, () => '1.0').join('\n');
    const p = tmpFile(`t 0\ndim 1\ncells 8\nspacing 0.125\nfield u\n${vals}\n`);
    expect(() => readSnapshot(p)).toThrow(SnapshotError);
  });

  it('rejects garbage headers', () => {
    expect(() => readSnapshot(tmpFile('nonsense\n'))).toThrow(SnapshotError);
  });
});
