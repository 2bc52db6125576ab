import { readFileSync } from 'fs';

export class SnapshotError extends Error {}

export interface Snapshot {
  t: number;
  dim: number;
  cells: number[]; // (nx) or (nx, ny)
  spacing: number[];
  fields: Record<string, number[]>; // row-major cell values
}

function headerNumbers(line: string | undefined, key: string, path: string): number[] {
  if (line === undefined || !line.startsWith(key + ' ')) {
    throw new SnapshotError(`${path}: expected header line '${key} ...'`);
  }
  const values = line.slice(key.length + 1).trim().split(/\s+/).map(Number);
  if (values.length === 0 || values.some((x) => !Number.isFinite(x))) {
    throw new SnapshotError(`${path}: malformed '${key}' header`);
  }
  return values;
}

export function readSnapshot(path: string): Snapshot {
  const lines = readFileSync(path, 'utf8').split('\n').filter((ln) => ln.length > 0);
  const t = headerNumbers(lines[0], 't', path)[0];
  const dim = headerNumbers(lines[1], 'dim', path)[0];
  const cells = headerNumbers(lines[2], 'cells', path);
  const spacing = headerNumbers(lines[3], 'spacing', path);
  if (dim !== 1 && dim !== 2) {
    throw new SnapshotError(`${path}: dim must be 1 or 2, got ${dim}`);
  }
  if (cells.length !== dim || spacing.length !== dim) {
    throw new SnapshotError(
      `${path}: dim ${dim} but ${cells.length} cell counts and ` +
      `${spacing.length} spacings`
    );
  }
  const nCells = cells.reduce((a, b) => a * b, 1);
  const fields: Record<string, number[]> = {};
  let i = 4;
  while (i < lines.length) {
    if (!lines[i].startsWith('field ')) {
      throw new SnapshotError(`${path}: expected 'field <name>' at line ${i + 1}`);
    }
    const name = lines[i].split(/\s+/)[1];
    const chunk = lines.slice(i + 1, i + 1 + nCells);
    if (chunk.length < nCells) {
      throw new SnapshotError(
        `${path}: field ${name} has ${chunk.length} values, expected ${nCells}`
      );
    }
    const values = chunk.map(Number);
    if (values.some((x) => !Number.isFinite(x))) {
      throw new SnapshotError(`${path}: field ${name} has a non-numeric value`);
    }
    fields[name] = values;
    i += 1 + nCells;
  }
  if (!('u' in fields) || !('v' in fields)) {
    throw new SnapshotError(`${path}: snapshot must carry 'u' and 'v' sections`);
  }
  return { t, dim, cells, spacing, fields };
}
