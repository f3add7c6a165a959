/** Command line:
 *
 *   plotgen --csv ipd.csv [--csv more.csv ...] --output figure.svg
 *           [--title NAME[,NAME2,...]] [--seat 0 --seat 1] [--algo fcl]
 *           [--window 50] [--reference -2.0]
 *
 * Each CSV becomes one panel; filters, smoothing window and the dotted
 * reference value apply to every panel. */

import { readFileSync, writeFileSync } from "fs";
import { basename } from "path";
import { parseResultCsv, SchemaError } from "./csv.js";
import { buildPanel, renderFigure, PanelSpec } from "./figure.js";

export interface CliOptions {
  csvPaths: string[];
  output: string;
  titles: string[];
  seats?: number[];
  algos?: string[];
  window: number;
  reference?: number;
}

export function parseArgs(argv: string[]): CliOptions {
  const options: CliOptions = { csvPaths: [], output: "", titles: [], window: 1 };
  const seats: number[] = [];
  const algos: string[] = [];
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    const need = (): string => {
      const value = argv[++i];
      if (value === undefined) throw new SchemaError(`missing value for ${flag}`);
      return value;
    };
    switch (flag) {
      case "--csv":
        options.csvPaths.push(need());
        break;
      case "--output":
        options.output = need();
        break;
      case "--title":
        options.titles.push(...need().split(","));
        break;
      case "--seat":
        seats.push(parseIntStrict(need(), flag));
        break;
      case "--algo":
        algos.push(need());
        break;
      case "--window":
        options.window = parseIntStrict(need(), flag);
        if (options.window < 1) throw new SchemaError("--window must be >= 1");
        break;
      case "--reference":
        options.reference = Number(need());
        if (Number.isNaN(options.reference)) {
          throw new SchemaError("--reference must be numeric");
        }
        break;
      default:
        throw new SchemaError(`unknown flag ${flag}`);
    }
  }
  if (options.csvPaths.length === 0) throw new SchemaError("at least one --csv is required");
  if (options.output === "") throw new SchemaError("--output is required");
  if (seats.length > 0) options.seats = seats;
  if (algos.length > 0) options.algos = algos;
  return options;
}

function parseIntStrict(raw: string, flag: string): number {
  const value = Number(raw);
  if (!Number.isInteger(value)) throw new SchemaError(`${flag} expects an integer`);
  return value;
}

export function run(argv: string[]): number {
  let options: CliOptions;
  try {
    options = parseArgs(argv);
    const panels: PanelSpec[] = options.csvPaths.map((path, i) => {
      const rows = parseResultCsv(readFileSync(path, "utf8"));
      return buildPanel(rows, {
        title: options.titles[i] ?? basename(path).replace(/\.csv$/, ""),
        seats: options.seats,
        algos: options.algos,
        window: options.window,
        reference: options.reference,
      });
    });
    writeFileSync(options.output, renderFigure(panels));
    console.log(`wrote ${options.output} (${panels.length} panel(s))`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError || (err as NodeJS.ErrnoException).code === "ENOENT") {
      console.error(`error: ${(err as Error).message}`);
      return 1;
    }
    throw err;
  }
}

if (process.argv[1] !== undefined && import.meta.url.endsWith(basename(process.argv[1]))) {
  process.exit(run(process.argv.slice(2)));
}
