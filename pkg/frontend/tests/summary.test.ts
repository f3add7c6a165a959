import { readFileSync } from "fs";
import { describe, expect, it } from "vitest";
import { parseResultCsv, ResultRow } from "../src/csv.js";
import { lateWindowMean, summarize } from "../src/summary.js";

function row(run: number, stage: number, seat: number, value: number): ResultRow {
  return { run, stage, seat, algo: "fcl", stageReturn: value, cumAvg: 0 };
}

describe("summarize", () => {
  it("computes cross-run mean and sample standard error", () => {
    const rows = [row(0, 0, 0, 1), row(1, 0, 0, 3), row(0, 1, 0, 2), row(1, 1, 0, 2)];
    const out = summarize(rows);
    expect(out.get(0)!.mean).toEqual([2, 2]);
    // sample stddev of [1, 3] is sqrt(2); stderr = sqrt(2)/sqrt(2) = 1
    expect(out.get(0)!.stderr[0]).toBeCloseTo(1, 12);
    expect(out.get(0)!.stderr[1]).toBe(0);
  });

  it("single run yields zero stderr", () => {
    const out = summarize([row(0, 0, 0, 5), row(0, 1, 0, 7)]);
    expect(out.get(0)!.stderr).toEqual([0, 0]);
  });

  it("trailing window averages only the stages seen so far", () => {
    const rows = [0, 1, 2, 3, 4].map((t) => row(0, t, 0, t));
    const smooth = summarize(rows, 3).get(0)!.mean;
    expect(smooth[0]).toBeCloseTo(0, 12);
    expect(smooth[1]).toBeCloseTo(0.5, 12);
    expect(smooth[4]).toBeCloseTo(3, 12); // (2+3+4)/3
  });

  it("rejects gaps and empty input", () => {
    expect(() => summarize([])).toThrow(/no rows/);
    expect(() => summarize([row(0, 0, 0, 1), row(0, 2, 0, 1)])).toThrow(/missing/);
  });

  it("matches the harness summary on the fixture within display precision", () => {
    const rows = parseResultCsv(
      readFileSync(new URL("./fixtures/curves.csv", import.meta.url), "utf8"),
    );
    const expected = JSON.parse(
      readFileSync(new URL("./fixtures/curves_summary.json", import.meta.url), "utf8"),
    ) as Record<string, { mean: number[]; stderr: number[]; window: number }>;
    for (const [key, want] of Object.entries(expected)) {
      const seat = Number(key.split(":")[0]);
      const out = summarize(rows, want.window).get(seat)!;
      for (let t = 0; t < want.mean.length; t++) {
        expect(out.mean[t]).toBeCloseTo(want.mean[t], 9);
        expect(out.stderr[t]).toBeCloseTo(want.stderr[t], 9);
      }
    }
  });

  it("late-window mean averages the final tenth across runs", () => {
    const rows: ResultRow[] = [];
    for (let run = 0; run < 2; run++) {
      for (let t = 0; t < 20; t++) rows.push(row(run, t, 0, t >= 18 ? 10 : 0));
    }
    expect(lateWindowMean(rows, 0)).toBeCloseTo(10, 12);
    expect(() => lateWindowMean(rows, 3)).toThrow(/no rows/);
  });
});
