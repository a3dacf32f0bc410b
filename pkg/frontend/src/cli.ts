#!/usr/bin/env node
import { writeFileSync } from 'node:fs';
import { parseArgs } from 'node:util';

import { readTable } from './csv.js';
import { FigureKind, render } from './figures.js';

const USAGE = 'usage: leolab-plot --kind <cdf|boxes|bars> --in <csv> --out <svg>';

export function main(argv: string[]): number {
  let args;
  try {
    args = parseArgs({
      args: argv,
      options: {
        kind: { type: 'string' },
        in: { type: 'string' },
        out: { type: 'string' },
        help: { type: 'boolean', short: 'h' },
      },
    });
  } catch (err) {
    console.error((err as Error).message);
    console.error(USAGE);
    return 2;
  }
  if (args.values.help) {
    console.log(USAGE);
    return 0;
  }
  const { kind, in: input, out } = args.values;
  if (!kind || !input || !out) {
    console.error(USAGE);
    return 2;
  }
  if (!['cdf', 'boxes', 'bars'].includes(kind)) {
    console.error(`unknown figure kind: ${kind}`);
    console.error(USAGE);
    return 2;
  }
  try {
    const table = readTable(input);
    writeFileSync(out, render(kind as FigureKind, table));
  } catch (err) {
    console.error((err as Error).message);
    return 1;
  }
  return 0;
}

process.exit(main(process.argv.slice(2)));
