import { mkdtempSync, writeFileSync } from 'fs';
import { tmpdir } from 'os';
import { join } from 'path';
import { describe, expect, it } from 'vitest';

import { DIAGNOSTICS_HEADER, SUMMARY_HEADER, SchemaError, readCsvStrict } from '../src/csv';

const FIXTURES = join(__dirname, 'fixtures');

function tmpFile(content: string): string {
  const dir = mkdtempSync(join(tmpdir(), 'plots-'));
  const p = join(dir, 'x.csv');
  writeFileSync(p, content);
  return p;
}

describe('readCsvStrict', () => {
  it('parses the real summary fixture', () => {
    const table = readCsvStrict(join(FIXTURES, 'summary.csv'), SUMMARY_HEADER);
    expect(table.rows.length).toBe(3);
    expect(table.rows[0][0]).toBeCloseTo(0.1, 12);
    expect(table.rows[0][1]).toBeGreaterThan(table.rows[1][1]); // E_u decreasing
  });

  it('parses the real diagnostics fixture', () => {
    const table = readCsvStrict(join(FIXTURES, 'diagnostics.csv'), DIAGNOSTICS_HEADER);
    expect(table.rows[0][0]).toBe(0); // starts at t = 0
    const masses = table.rows.map((r) => r[1]);
    expect(Math.max(...masses) - Math.min(...masses)).toBeLessThan(1e-9);
  });

  it('names missing and unexpected columns', () => {
    const p = tmpFile('lambda,E_u,runtime_seconds\n0.1,1,2\n');
    expect(() => readCsvStrict(p, SUMMARY_HEADER)).toThrowError(/missing columns \[E_v\]/);
  });

  it('rejects reordered headers', () => {
    const p = tmpFile('E_u,lambda,E_v,runtime_seconds\n1,0.1,1,2\n');
    expect(() => readCsvStrict(p, SUMMARY_HEADER)).toThrow(SchemaError);
  });

  it('rejects ragged rows', () => {
    const p = tmpFile('lambda,E_u,E_v,runtime_seconds\n0.1,1,2\n');
    expect(() => readCsvStrict(p, SUMMARY_HEADER)).toThrowError(/row 1/);
  });

  it('rejects non-numeric cells', () => {
    const p = tmpFile('lambda,E_u,E_v,runtime_seconds\n0.1,abc,2,3\n');
    expect(() => readCsvStrict(p, SUMMARY_HEADER)).toThrowError(/non-numeric/);
  });

  it('rejects empty files', () => {
    expect(() => readCsvStrict(tmpFile(''), SUMMARY_HEADER)).toThrowError(/empty/);
  });
});
