/** Parsing for the experiment harness CSV schema:
 *
 *     run,stage,seat,algo,stage_return,cum_avg
 *
 * one row per (run, stage, seat). */

export const CSV_HEADER = "run,stage,seat,algo,stage_return,cum_avg";

export interface ResultRow {
  run: number;
  stage: number;
  seat: number;
  algo: string;
  stageReturn: number;
  cumAvg: number;
}

export class SchemaError extends Error {}

export function parseResultCsv(text: string): ResultRow[] {
  const lines = text.split(/\r?\n/);
  if (lines.length === 0 || lines[0].trim() !== CSV_HEADER) {
    throw new SchemaError(
      `unexpected CSV header ${JSON.stringify(lines[0] ?? "")}; ` +
        `expected ${JSON.stringify(CSV_HEADER)}`,
    );
  }
  const rows: ResultRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i].trim();
    if (line === "") continue;
    const parts = line.split(",");
    if (parts.length !== 6) {
      throw new SchemaError(`line ${i + 1}: expected 6 columns, got ${parts.length}`);
    }
    const [run, stage, seat] = parts.slice(0, 3).map((p) => Number(p));
    const stageReturn = Number(parts[4]);
    const cumAvg = Number(parts[5]);
    for (const [name, value] of [
      ["run", run],
      ["stage", stage],
      ["seat", seat],
      ["stage_return", stageReturn],
      ["cum_avg", cumAvg],
    ] as const) {
      if (Number.isNaN(value)) {
        throw new SchemaError(`line ${i + 1}: non-numeric ${name}`);
      }
    }
    if (!Number.isInteger(run) || !Number.isInteger(stage) || !Number.isInteger(seat)) {
      throw new SchemaError(`line ${i + 1}: run/stage/seat must be integers`);
    }
    rows.push({ run, stage, seat, algo: parts[3], stageReturn, cumAvg });
  }
  return rows;
}
