import { readFileSync } from 'node:fs';
import { describe, expect, it } from 'vitest';

import { readTable } from '../src/csv.js';
import { render, renderBars, renderBoxes, renderCdf } from '../src/figures.js';

const FIXTURES = new URL('../fixtures/', import.meta.url).pathname;
const GOLDEN = new URL('./golden/', import.meta.url).pathname;

function seriesNames(svg: string): string[] {
  return [...svg.matchAll(/data-series="([^"]+)"/g)].map((m) => m[1]);
}

describe('renderCdf', () => {
  const table = readTable(FIXTURES + 'frr.csv');
  const svg = renderCdf(table);

  it('draws one curve per scheme', () => {
    expect(new Set(seriesNames(svg))).toEqual(
      new Set(['tag_frr', 'lfa', 'mpls_frr', 'optimal_global', 'optimal_local']),
    );
  });

  it('keeps curves inside the viewBox', () => {
    for (const match of svg.matchAll(/points="([^"]+)"/g)) {
      for (const pair of match[1].split(' ')) {
        const [x, y] = pair.split(',').map(Number);
        expect(x).toBeGreaterThanOrEqual(0);
        expect(x).toBeLessThanOrEqual(640);
        expect(y).toBeGreaterThanOrEqual(0);
        expect(y).toBeLessThanOrEqual(400);
      }
    }
  });

  it('plateaus the lfa curve below 1 because of inf rows', () => {
    const polylines = [...svg.matchAll(/<polyline[^>]*data-series="([^"]+)"/g)];
    expect(polylines.length).toBe(5);
    const lfa = svg.match(/<polyline points="([^"]+)"[^>]*data-series="lfa"/);
    expect(lfa).not.toBeNull();
    const pairs = lfa![1].split(' ').map((p) => p.split(',').map(Number));
    const yTop = 30; // top margin: y coordinate of fraction 1.0
    const lastY = pairs[pairs.length - 1][1];
    expect(lastY).toBeGreaterThan(yTop + 1);
  });

  it('rejects tables with the wrong schema', () => {
    expect(() => renderCdf(readTable(FIXTURES + 'multigs.csv'))).toThrow(
      /frr\/1/,
    );
  });
});

describe('renderBoxes', () => {
  const table = readTable(FIXTURES + 'multigs.csv');
  const svg = renderBoxes(table);

  it('draws one box per botnet size in ascending order', () => {
    expect(seriesNames(svg)).toEqual(['100', '500', '1000']);
  });

  it('rejects tables with the wrong schema', () => {
    expect(() => renderBoxes(readTable(FIXTURES + 'frr.csv'))).toThrow(
      /multigs\/1/,
    );
  });
});

describe('renderBars', () => {
  const table = readTable(FIXTURES + 'validation.csv');
  const svg = renderBars(table);

  it('draws three bars per packet class', () => {
    const names = seriesNames(svg);
    const classes = new Set(names.map((n) => n.split(':')[0]));
    expect(names.length).toBe(classes.size * 3);
    for (const cls of classes) {
      expect(names.filter((n) => n.startsWith(cls + ':'))).toHaveLength(3);
    }
  });

  it('rejects tables with the wrong schema', () => {
    expect(() => renderBars(readTable(FIXTURES + 'frr.csv'))).toThrow(
      /validation\/1/,
    );
  });
});

describe('golden output', () => {
  const cases: [string, string, 'cdf' | 'boxes' | 'bars'][] = [
    ['frr.csv', 'cdf.svg', 'cdf'],
    ['multigs.csv', 'boxes.svg', 'boxes'],
    ['validation.csv', 'bars.svg', 'bars'],
  ];

  it.each(cases)('%s renders byte-identically to %s', (csv, golden, kind) => {
    const svg = render(kind, readTable(FIXTURES + csv));
    expect(svg).toBe(readFileSync(GOLDEN + golden, 'utf8'));
  });
});
