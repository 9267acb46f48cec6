#!/usr/bin/env node
/** plot --csv <paths> --rounds <list> --out <dir> [--log-y] [--title tpl] */

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { SchemaMismatch } from "./csv.js";
import { renderConvergence } from "./figure.js";

export function parseRounds(tokens: (string | number)[]): number[] {
  const rounds = tokens
    .flatMap((tok) => String(tok).split(","))
    .filter((tok) => tok.length > 0)
    .map((tok) => Number(tok));
  if (rounds.some((r) => !Number.isInteger(r) || r < 1)) {
    throw new Error(`rounds must be positive integers, got ${tokens.join(" ")}`);
  }
  return rounds;
}

export async function main(argv: string[]): Promise<number> {
  const args = await yargs(argv)
    .usage("plot --csv <paths..> --rounds <list> --out <dir>")
    .option("csv", { type: "string", array: true, demandOption: true,
                     describe: "experiment trace CSV files" })
    .option("rounds", { type: "string", array: true, demandOption: true,
                        describe: "rounds to panel (space- or comma-separated)" })
    .option("out", { type: "string", demandOption: true,
                     describe: "output directory for the SVG panels" })
    .option("title", { type: "string",
                       describe: "title template with {round} and {source}" })
    .option("log-y", { type: "boolean", default: false,
                       describe: "log-scale error axis (default linear)" })
    .strict()
    .parse();

  try {
    const written = renderConvergence({
      csvPaths: args.csv,
      rounds: parseRounds(args.rounds),
      outDir: args.out,
      titleTemplate: args.title,
      logY: args["log-y"],
    });
    for (const file of written) {
      console.log(file);
    }
    return 0;
  } catch (err) {
    const kind = err instanceof SchemaMismatch ? "schema-mismatch" : "error";
    console.error(`${kind}: ${(err as Error).message}`);
    return 1;
  }
}

const isDirectRun = process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (isDirectRun) {
  main(hideBin(process.argv)).then((code) => process.exit(code));
}
