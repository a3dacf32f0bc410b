import { readFileSync } from 'node:fs';
import Papa from 'papaparse';

/** Schema versions this tool understands, keyed by the CSV's first line. */
export const KNOWN_SCHEMAS = ['frr/1', 'validation/1', 'multigs/1'] as const;
export type Schema = (typeof KNOWN_SCHEMAS)[number];

export interface Table {
  schema: Schema;
  rows: Record<string, string>[];
  columns: string[];
}

/** Unavailable backup paths are written as the literal "inf". */
export function numeric(value: string): number {
  if (value === 'inf') return Infinity;
  const parsed = Number(value);
  if (value === '' || Number.isNaN(parsed)) {
    throw new Error(`not a number: ${JSON.stringify(value)}`);
  }
  return parsed;
}

export function parseTable(text: string): Table {
  const newline = text.indexOf('\n');
  const first = newline < 0 ? text : text.slice(0, newline);
  const match = /^#schema=(.+)$/.exec(first.trim());
  if (!match) {
    throw new Error('missing #schema= header line');
  }
  const schema = match[1] as Schema;
  if (!KNOWN_SCHEMAS.includes(schema)) {
    throw new Error(`unknown schema version: ${schema}`);
  }
  const body = text.slice(newline + 1);
  const parsed = Papa.parse<Record<string, string>>(body, {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    throw new Error(`CSV parse error: ${parsed.errors[0].message}`);
  }
  if (parsed.data.length === 0) {
    throw new Error('empty table');
  }
  return { schema, rows: parsed.data, columns: parsed.meta.fields ?? [] };
}

export function readTable(path: string): Table {
  return parseTable(readFileSync(path, 'utf8'));
}

/** Rows grouped by the given column, preserving first-seen order. */
export function groupBy(
  rows: Record<string, string>[],
  column: string,
): Map<string, Record<string, string>[]> {
  const groups = new Map<string, Record<string, string>[]>();
  for (const row of rows) {
    const key = row[column];
    const bucket = groups.get(key);
    if (bucket) bucket.push(row);
    else groups.set(key, [row]);
  }
  return groups;
}
