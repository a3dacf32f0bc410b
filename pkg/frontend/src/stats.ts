export interface CdfSeries {
  /** Step points (x, fraction of all samples <= x), finite values only. */
  points: [number, number][];
  /** Fraction of samples that are finite; the curve plateaus here when
   *  infinite sentinels are present. */
  plateau: number;
}

/** Empirical CDF over values that may include Infinity sentinels. */
export function cdf(values: number[]): CdfSeries {
  if (values.length === 0) throw new Error('empty series');
  const finite = values.filter((v) => Number.isFinite(v)).sort((a, b) => a - b);
  const n = values.length;
  const points: [number, number][] = [];
  for (let k = 0; k < finite.length; k++) {
    if (k + 1 < finite.length && finite[k + 1] === finite[k]) continue;
    points.push([finite[k], (k + 1) / n]);
  }
  return { points, plateau: finite.length / n };
}

/** Linear-interpolated percentile of the finite values. */
export function percentile(values: number[], pct: number): number {
  const finite = values.filter((v) => Number.isFinite(v)).sort((a, b) => a - b);
  if (finite.length === 0) throw new Error('no finite values');
  const pos = (pct / 100) * (finite.length - 1);
  const lo = Math.floor(pos);
  const hi = Math.ceil(pos);
  return finite[lo] + (finite[hi] - finite[lo]) * (pos - lo);
}

export interface BoxStats {
  min: number;
  q1: number;
  median: number;
  q3: number;
  max: number;
}

export function boxStats(values: number[]): BoxStats {
  return {
    min: percentile(values, 0),
    q1: percentile(values, 25),
    median: percentile(values, 50),
    q3: percentile(values, 75),
    max: percentile(values, 100),
  };
}
