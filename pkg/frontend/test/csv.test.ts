import { readFileSync } from 'node:fs';
import { describe, expect, it } from 'vitest';

import { groupBy, numeric, parseTable, readTable } from '../src/csv.js';

const FIXTURES = new URL('../fixtures/', import.meta.url).pathname;

describe('numeric', () => {
  it('parses plain numbers', () => {
    expect(numeric('3.25')).toBe(3.25);
    expect(numeric('-1')).toBe(-1);
  });

  it('maps the inf sentinel to Infinity', () => {
    expect(numeric('inf')).toBe(Infinity);
  });

  it('rejects junk and empty strings', () => {
    expect(() => numeric('')).toThrow(/not a number/);
    expect(() => numeric('n/a')).toThrow(/not a number/);
  });
});

describe('parseTable', () => {
  it('requires the schema header line', () => {
    expect(() => parseTable('a,b\n1,2\n')).toThrow(/#schema=/);
  });

  it('rejects unknown schema versions', () => {
    expect(() => parseTable('#schema=frr/99\na,b\n1,2\n')).toThrow(
      /unknown schema version: frr\/99/,
    );
  });

  it('rejects empty tables', () => {
    expect(() => parseTable('#schema=frr/1\na,b\n')).toThrow(/empty table/);
  });

  it('parses a minimal table', () => {
    const table = parseTable('#schema=frr/1\na,b\n1,2\n3,4\n');
    expect(table.schema).toBe('frr/1');
    expect(table.columns).toEqual(['a', 'b']);
    expect(table.rows).toEqual([
      { a: '1', b: '2' },
      { a: '3', b: '4' },
    ]);
  });
});

describe('fixtures', () => {
  it.each(['frr.csv', 'validation.csv', 'multigs.csv'])('reads %s', (name) => {
    const table = readTable(FIXTURES + name);
    expect(table.rows.length).toBeGreaterThan(0);
    expect(table.columns.length).toBeGreaterThan(1);
  });

  it('frr fixture carries inf sentinels through to Infinity', () => {
    const table = readTable(FIXTURES + 'frr.csv');
    const stretches = table.rows.map((r) => numeric(r.delay_stretch_pct));
    expect(stretches.some((v) => v === Infinity)).toBe(true);
    expect(stretches.some((v) => Number.isFinite(v))).toBe(true);
  });

  it('fixture files start with their schema line', () => {
    const text = readFileSync(FIXTURES + 'validation.csv', 'utf8');
    expect(text.startsWith('#schema=validation/1\n')).toBe(true);
  });
});

describe('groupBy', () => {
  it('preserves first-seen key order', () => {
    const rows = [{ k: 'b' }, { k: 'a' }, { k: 'b' }];
    const groups = groupBy(rows, 'k');
    expect([...groups.keys()]).toEqual(['b', 'a']);
    expect(groups.get('b')).toHaveLength(2);
  });
});
