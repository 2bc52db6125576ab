#!/usr/bin/env node
import { writeFileSync } from 'fs';
import yargs from 'yargs';

import { DIAGNOSTICS_HEADER, SUMMARY_HEADER, readCsvStrict } from './csv';
import { convergenceOption, diagnosticsOption, heatmapOption, renderSvg } from './figures';
import { readSnapshot } from './snapshot';

interface Options {
  kind: string;
  in: string;
  out: string;
  eta: number;
}

export function render(kind: string, inPath: string, eta: number): string {
  switch (kind) {
    case 'convergence':
      return renderSvg(convergenceOption(readCsvStrict(inPath, SUMMARY_HEADER)));
    case 'diagnostics':
      return renderSvg(diagnosticsOption(readCsvStrict(inPath, DIAGNOSTICS_HEADER), eta));
    case 'heatmap':
      return renderSvg(heatmapOption(readSnapshot(inPath)));
    default:
      throw new Error(`unknown figure kind '${kind}' (convergence | diagnostics | heatmap)`);
  }
}

export function main(argv: string[]): number {
  const args = yargs(argv)
    .usage('$0 <kind> --in <path> [--eta <float>] --out <image path>')
    .command('$0 <kind>', 'render a figure from harness outputs', (y) =>
      y.positional('kind', {
        describe: 'convergence | diagnostics | heatmap',
        type: 'string',
        demandOption: true,
      })
    )
    .option('in', { type: 'string', demandOption: true, describe: 'input CSV or snapshot' })
    .option('out', { type: 'string', demandOption: true, describe: 'output SVG path' })
    .option('eta', { type: 'number', default: 0.0, describe: 'signal floor reference line' })
    .strict()
    .exitProcess(false)
    .parseSync() as unknown as Options;

  try {
    const svg = render(args.kind, args.in, args.eta);
    writeFileSync(args.out, svg);
    return 0;
  } catch (err) {
    process.stderr.write(`error: ${err instanceof Error ? err.message : err}\n`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
