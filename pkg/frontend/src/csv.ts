import { readFileSync } from 'fs';

export const SUMMARY_HEADER = ['lambda', 'E_u', 'E_v', 'runtime_seconds'];
export const DIAGNOSTICS_HEADER = ['t', 'mass', 'min_v', 'max_u', 'w1q_v', 'lyapunov'];

export class SchemaError extends Error {}

export interface Table {
  header: string[];
  rows: number[][];
}

/** Strict reader for the harness CSVs: the header must match exactly and
 *  every cell must parse as a finite decimal number. */
export function readCsvStrict(path: string, expected: string[]): Table {
  const text = readFileSync(path, 'utf8');
  const lines = text.split('\n').filter((ln) => ln.length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`${path}: empty CSV`);
  }
  const header = lines[0].split(',');
  if (header.length !== expected.length || header.some((c, i) => c !== expected[i])) {
    const missing = expected.filter((c) => !header.includes(c));
    const extra = header.filter((c) => !expected.includes(c));
    throw new SchemaError(
      `${path}: header mismatch (missing columns [${missing.join(', ')}], ` +
      `unexpected columns [${extra.join(', ')}])`
    );
  }
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(',');
    if (cells.length !== expected.length) {
      throw new SchemaError(
        `${path}: row ${i} has ${cells.length} fields, expected ${expected.length}`
      );
    }
    const row = cells.map(Number);
    if (row.some((x) => !Number.isFinite(x))) {
      throw new SchemaError(`${path}: row ${i} has a non-numeric cell`);
    }
    rows.push(row);
  }
  return { header, rows };
}
