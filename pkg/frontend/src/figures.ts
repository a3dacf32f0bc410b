import { Table, groupBy, numeric } from './csv.js';
import { boxStats, cdf, percentile } from './stats.js';

export type FigureKind = 'cdf' | 'boxes' | 'bars';

const WIDTH = 640;
const HEIGHT = 400;
const MARGIN = { left: 60, right: 20, top: 30, bottom: 45 };
const PLOT_W = WIDTH - MARGIN.left - MARGIN.right;
const PLOT_H = HEIGHT - MARGIN.top - MARGIN.bottom;

const PALETTE = ['#1b6ca8', '#d1495b', '#66a182', '#edae49', '#8d6a9f'];

/** Percentile cap keeping infinite sentinels (and the far tail) off-scale. */
export const DEFAULT_CAP_PCT = 99;

function fmt(x: number): string {
  if (!Number.isFinite(x)) throw new Error('cannot format non-finite value');
  return Number(x.toPrecision(5)).toString();
}

function esc(text: string): string {
  return text.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

interface Frame {
  body: string[];
  xOf: (x: number) => number;
  yOf: (y: number) => number;
}

function frame(
  xMin: number, xMax: number, yMin: number, yMax: number,
  xLabel: string, yLabel: string, xTicks: number[], yTicks: number[],
): Frame {
  const xOf = (x: number) =>
    MARGIN.left + ((x - xMin) / (xMax - xMin)) * PLOT_W;
  const yOf = (y: number) =>
    MARGIN.top + PLOT_H - ((y - yMin) / (yMax - yMin)) * PLOT_H;
  const body: string[] = [];
  const x0 = MARGIN.left;
  const y0 = MARGIN.top + PLOT_H;
  body.push(`<line x1="${x0}" y1="${y0}" x2="${x0 + PLOT_W}" y2="${y0}" stroke="black"/>`);
  body.push(`<line x1="${x0}" y1="${MARGIN.top}" x2="${x0}" y2="${y0}" stroke="black"/>`);
  for (const t of xTicks) {
    const x = xOf(t);
    body.push(`<line x1="${fmt(x)}" y1="${y0}" x2="${fmt(x)}" y2="${y0 + 5}" stroke="black"/>`);
    body.push(`<text x="${fmt(x)}" y="${y0 + 20}" text-anchor="middle" font-size="12">${fmt(t)}</text>`);
  }
  for (const t of yTicks) {
    const y = yOf(t);
    body.push(`<line x1="${x0 - 5}" y1="${fmt(y)}" x2="${x0}" y2="${fmt(y)}" stroke="black"/>`);
    body.push(`<text x="${x0 - 8}" y="${fmt(y + 4)}" text-anchor="end" font-size="12">${fmt(t)}</text>`);
  }
  body.push(`<text x="${MARGIN.left + PLOT_W / 2}" y="${HEIGHT - 8}" text-anchor="middle" font-size="13">${esc(xLabel)}</text>`);
  body.push(`<text x="16" y="${MARGIN.top + PLOT_H / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 16 ${MARGIN.top + PLOT_H / 2})">${esc(yLabel)}</text>`);
  return { body, xOf, yOf };
}

function svg(body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
    ...body,
    '</svg>',
  ].join('\n') + '\n';
}

function ticks(min: number, max: number, count: number): number[] {
  const out: number[] = [];
  for (let k = 0; k <= count; k++) out.push(min + ((max - min) * k) / count);
  return out;
}

/** Per-scheme delay-stretch CDFs; rows with the "inf" sentinel leave the
 *  curve plateaued below 1. */
export function renderCdf(table: Table, capPct = DEFAULT_CAP_PCT): string {
  if (table.schema !== 'frr/1') {
    throw new Error(`cdf figure needs frr/1 data, got ${table.schema}`);
  }
  const bySchemes = groupBy(table.rows, 'scheme');
  const all: number[] = [];
  for (const rows of bySchemes.values()) {
    for (const row of rows) all.push(numeric(row.delay_stretch_pct));
  }
  const xMax = Math.max(percentile(all, capPct), 1e-9);
  const f = frame(0, xMax, 0, 1, 'delay stretch (%)', 'fraction of trials',
                  ticks(0, xMax, 5), ticks(0, 1, 5));
  let color = 0;
  for (const [scheme, rows] of bySchemes) {
    const series = cdf(rows.map((row) => numeric(row.delay_stretch_pct)));
    const pts: string[] = [`${fmt(f.xOf(0))},${fmt(f.yOf(0))}`];
    let prevY = 0;
    for (const [x, y] of series.points) {
      const cx = Math.min(x, xMax);
      pts.push(`${fmt(f.xOf(cx))},${fmt(f.yOf(prevY))}`);
      pts.push(`${fmt(f.xOf(cx))},${fmt(f.yOf(y))}`);
      prevY = y;
      if (x >= xMax) break;
    }
    pts.push(`${fmt(f.xOf(xMax))},${fmt(f.yOf(Math.min(prevY, series.plateau)))}`);
    const stroke = PALETTE[color % PALETTE.length];
    f.body.push(`<polyline points="${pts.join(' ')}" fill="none" stroke="${stroke}" stroke-width="1.8" data-series="${esc(scheme)}"/>`);
    f.body.push(`<text x="${MARGIN.left + PLOT_W - 6}" y="${MARGIN.top + 14 + 15 * color}" text-anchor="end" font-size="12" fill="${stroke}">${esc(scheme)}</text>`);
    color++;
  }
  return svg(f.body);
}

/** Usable-pair-fraction box plots per botnet size. */
export function renderBoxes(table: Table): string {
  if (table.schema !== 'multigs/1') {
    throw new Error(`boxes figure needs multigs/1 data, got ${table.schema}`);
  }
  const bySize = groupBy(table.rows, 'botnet_size');
  const sizes = [...bySize.keys()].sort((a, b) => Number(a) - Number(b));
  const f = frame(0, sizes.length, 0, 1, 'botnet size (GS pairs)',
                  'usable-pair fraction', [], ticks(0, 1, 5));
  sizes.forEach((size, k) => {
    const stats = boxStats(
      bySize.get(size)!.map((row) => numeric(row.usable_fraction)));
    const cx = f.xOf(k + 0.5);
    const half = (PLOT_W / sizes.length) * 0.25;
    const box = [
      `<line x1="${fmt(cx)}" y1="${fmt(f.yOf(stats.min))}" x2="${fmt(cx)}" y2="${fmt(f.yOf(stats.q1))}" stroke="black"/>`,
      `<line x1="${fmt(cx)}" y1="${fmt(f.yOf(stats.q3))}" x2="${fmt(cx)}" y2="${fmt(f.yOf(stats.max))}" stroke="black"/>`,
      `<rect x="${fmt(cx - half)}" y="${fmt(f.yOf(stats.q3))}" width="${fmt(2 * half)}" height="${fmt(Math.max(f.yOf(stats.q1) - f.yOf(stats.q3), 0.5))}" fill="${PALETTE[0]}" fill-opacity="0.4" stroke="black" data-series="${esc(size)}"/>`,
      `<line x1="${fmt(cx - half)}" y1="${fmt(f.yOf(stats.median))}" x2="${fmt(cx + half)}" y2="${fmt(f.yOf(stats.median))}" stroke="black" stroke-width="2"/>`,
      `<text x="${fmt(cx)}" y="${MARGIN.top + PLOT_H + 20}" text-anchor="middle" font-size="12">${esc(size)}</text>`,
    ];
    f.body.push(...box);
  });
  return svg(f.body);
}

/** Pass rates per packet class: the tag validator against both
 *  delay-threshold baselines. */
export function renderBars(table: Table): string {
  if (table.schema !== 'validation/1') {
    throw new Error(`bars figure needs validation/1 data, got ${table.schema}`);
  }
  const byClass = groupBy(table.rows, 'packet_class');
  const classes = [...byClass.keys()];
  const series: [string, string][] = [
    ['tag validator', 'tag_validator_pass'],
    ['10% threshold', 'thr10_pass'],
    ['20% threshold', 'thr20_pass'],
  ];
  const f = frame(0, classes.length, 0, 1, 'packet class', 'pass rate',
                  [], ticks(0, 1, 5));
  classes.forEach((cls, k) => {
    const rows = byClass.get(cls)!;
    const slot = PLOT_W / classes.length;
    series.forEach(([label, column], j) => {
      const rate =
        rows.reduce((acc, row) => acc + numeric(row[column]), 0) / rows.length;
      const barW = slot * 0.22;
      const x = f.xOf(k) + slot * 0.17 + j * barW;
      const y = f.yOf(rate);
      f.body.push(`<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(barW)}" height="${fmt(Math.max(f.yOf(0) - y, 0))}" fill="${PALETTE[j]}" data-series="${esc(cls)}:${esc(label)}"/>`);
    });
    f.body.push(`<text x="${fmt(f.xOf(k + 0.5))}" y="${MARGIN.top + PLOT_H + 20}" text-anchor="middle" font-size="10">${esc(cls)}</text>`);
  });
  series.forEach(([label], j) => {
    f.body.push(`<text x="${MARGIN.left + PLOT_W - 6}" y="${MARGIN.top + 14 + 15 * j}" text-anchor="end" font-size="12" fill="${PALETTE[j]}">${esc(label)}</text>`);
  });
  return svg(f.body);
}

export function render(kind: FigureKind, table: Table): string {
  if (kind === 'cdf') return renderCdf(table);
  if (kind === 'boxes') return renderBoxes(table);
  if (kind === 'bars') return renderBars(table);
  throw new Error(`unknown figure kind: ${kind}`);
}
