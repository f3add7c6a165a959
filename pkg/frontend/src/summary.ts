/** Cross-run learning-curve statistics, mirroring the experiment harness:
 * per-stage mean over runs, standard error (sample stddev / sqrt(runs)),
 * and an optional trailing moving average whose early entries average only
 * the stages seen so far. */

import { ResultRow, SchemaError } from "./csv.js";

export interface SeatSummary {
  mean: number[];
  stderr: number[];
}

export function summarize(rows: ResultRow[], window = 1): Map<number, SeatSummary> {
  if (rows.length === 0) throw new SchemaError("no rows to summarize");
  if (window < 1) throw new SchemaError("window must be >= 1");
  const runs = [...new Set(rows.map((r) => r.run))].sort((a, b) => a - b);
  const seats = [...new Set(rows.map((r) => r.seat))].sort((a, b) => a - b);
  const stages = Math.max(...rows.map((r) => r.stage)) + 1;
  const runPos = new Map(runs.map((r, i) => [r, i]));

  const data = new Map<number, number[][]>();
  for (const seat of seats) {
    data.set(seat, Array.from({ length: runs.length }, () => new Array(stages).fill(NaN)));
  }
  for (const row of rows) {
    data.get(row.seat)![runPos.get(row.run)!][row.stage] = row.stageReturn;
  }

  const out = new Map<number, SeatSummary>();
  for (const seat of seats) {
    const grid = data.get(seat)!;
    const mean = new Array(stages).fill(0);
    const stderr = new Array(stages).fill(0);
    for (let t = 0; t < stages; t++) {
      let sum = 0;
      for (const run of grid) {
        if (Number.isNaN(run[t])) {
          throw new SchemaError("missing (run, stage, seat) combinations");
        }
        sum += run[t];
      }
      const m = sum / runs.length;
      mean[t] = m;
      if (runs.length > 1) {
        let ss = 0;
        for (const run of grid) ss += (run[t] - m) * (run[t] - m);
        stderr[t] = Math.sqrt(ss / (runs.length - 1)) / Math.sqrt(runs.length);
      }
    }
    out.set(seat, {
      mean: trailingAverage(mean, window),
      stderr: trailingAverage(stderr, window),
    });
  }
  return out;
}

function trailingAverage(values: number[], window: number): number[] {
  if (window <= 1) return values;
  const out = new Array(values.length).fill(0);
  let acc = 0;
  for (let t = 0; t < values.length; t++) {
    acc += values[t];
    if (t >= window) acc -= values[t - window];
    out[t] = acc / Math.min(t + 1, window);
  }
  return out;
}

export function lateWindowMean(rows: ResultRow[], seat: number, fraction = 0.1): number {
  if (!(fraction > 0 && fraction <= 1)) {
    throw new SchemaError("fraction must lie in (0, 1]");
  }
  const stages = Math.max(...rows.map((r) => r.stage)) + 1;
  const cutoff = Math.ceil(stages * (1 - fraction));
  let sum = 0;
  let count = 0;
  for (const row of rows) {
    if (row.seat === seat && row.stage >= cutoff) {
      sum += row.stageReturn;
      count += 1;
    }
  }
  if (count === 0) throw new SchemaError(`no rows for seat ${seat}`);
  return sum / count;
}
