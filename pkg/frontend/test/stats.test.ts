import { describe, expect, it } from 'vitest';

import { boxStats, cdf, percentile } from '../src/stats.js';

describe('cdf', () => {
  it('is a monotone step function reaching 1 for finite data', () => {
    const series = cdf([3, 1, 2, 2]);
    expect(series.plateau).toBe(1);
    expect(series.points).toEqual([
      [1, 0.25],
      [2, 0.75],
      [3, 1],
    ]);
    for (let k = 1; k < series.points.length; k++) {
      expect(series.points[k][0]).toBeGreaterThan(series.points[k - 1][0]);
      expect(series.points[k][1]).toBeGreaterThan(series.points[k - 1][1]);
    }
  });

  it('plateaus below 1 when Infinity sentinels are present', () => {
    const series = cdf([1, 2, Infinity, Infinity]);
    expect(series.plateau).toBe(0.5);
    expect(series.points).toEqual([
      [1, 0.25],
      [2, 0.5],
    ]);
  });

  it('rejects empty input', () => {
    expect(() => cdf([])).toThrow(/empty/);
  });
});

describe('percentile', () => {
  it('interpolates linearly and ignores Infinity', () => {
    expect(percentile([0, 10], 50)).toBe(5);
    expect(percentile([0, 10, Infinity], 100)).toBe(10);
    expect(percentile([1, 2, 3, 4], 0)).toBe(1);
  });

  it('rejects all-infinite input', () => {
    expect(() => percentile([Infinity], 50)).toThrow(/no finite/);
  });
});

describe('boxStats', () => {
  it('matches hand-computed quartiles', () => {
    const stats = boxStats([1, 2, 3, 4, 5]);
    expect(stats).toEqual({ min: 1, q1: 2, median: 3, q3: 4, max: 5 });
  });
});
