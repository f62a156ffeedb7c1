#!/usr/bin/env node
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { readSeries } from "./csv";
import { renderFigure } from "./render";
import { KINDS, Kind, SchemaError } from "./schema";

export function main(argv: string[]): number {
  const args = yargs(argv)
    .usage("plot-figs --kind ber --in results/*/ber.csv --out fig.png")
    .option("kind", {
      choices: KINDS,
      demandOption: true,
      describe: "figure type to render",
    })
    .option("in", {
      type: "string",
      array: true,
      demandOption: true,
      describe: "input CSV file(s); each becomes one overlaid series",
    })
    .option("out", {
      type: "string",
      demandOption: true,
      describe: "output image (.png or .svg)",
    })
    .strict()
    .exitProcess(false)
    .parseSync();

  try {
    const series = (args.in as string[]).map((f) =>
      readSeries(args.kind as Kind, f)
    );
    renderFigure(args.kind as Kind, series, args.out as string);
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 2;
    }
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(hideBin(process.argv)));
}
