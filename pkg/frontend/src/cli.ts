#!/usr/bin/env node
/** Command line: render one figure from one harness CSV. */

import yargs from "yargs";

import { readSweepSummary, readTrace, referenceParams } from "./csv.js";
import { plotSingleRun, plotSweep, writePng, type SweepKind } from "./figures.js";

const KINDS = ["single-run", "n-sweep", "kbar-sweep"] as const;

export function cliMain(raw: string[]): number {
  let argv;
  try {
    argv = yargs(raw)
      .scriptName("cbo-mpc-figures")
      .usage("$0 --input results/run/trace.csv --kind single-run --out fig1.png")
      .option("input", { type: "string", demandOption: true, describe: "harness CSV to plot" })
      .option("kind", { choices: KINDS, demandOption: true, describe: "figure type" })
      .option("out", { type: "string", demandOption: true, describe: "output PNG path" })
      .option("dpi", { type: "number", default: 150 })
      .option("linear-loss", {
        type: "boolean",
        default: false,
        describe: "linear instead of log loss axis",
      })
      .strict()
      .exitProcess(false)
      .parseSync();
  } catch (err) {
    console.error(`cbo-mpc-figures: ${err instanceof Error ? err.message : err}`);
    return 2;
  }

  try {
    const opts = { logLoss: !argv.linearLoss };
    if (argv.kind === "single-run") {
      const rows = readTrace(argv.input);
      const { canvas } = plotSingleRun(rows, referenceParams(argv.input), opts);
      writePng(canvas, argv.out, argv.dpi);
    } else {
      const rows = readSweepSummary(argv.input);
      writePng(plotSweep(rows, argv.kind as SweepKind, opts), argv.out, argv.dpi);
    }
    console.log(`wrote ${argv.out}`);
    return 0;
  } catch (err) {
    console.error(`cbo-mpc-figures: error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

// invoked directly (not imported by tests)
if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(cliMain(process.argv.slice(2)));
}
