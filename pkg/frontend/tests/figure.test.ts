import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { afterAll, describe, expect, it } from "vitest";
import { CSV_HEADER, parseResultCsv, SchemaError } from "../src/csv.js";
import { buildPanel, renderFigure } from "../src/figure.js";
import { parseArgs, run } from "../src/cli.js";

function makeCsv(runs: number): string {
  const lines = [CSV_HEADER];
  for (let run = 0; run < runs; run++) {
    for (let t = 0; t < 10; t++) {
      lines.push(`${run},${t},0,fcl,${-1 - 0.1 * run},0`);
      lines.push(`${run},${t},1,q,${0.5 * run},0`);
    }
  }
  return lines.join("\n") + "\n";
}

describe("buildPanel / renderFigure", () => {
  it("renders one mean line per seat with an error band", () => {
    const panel = buildPanel(parseResultCsv(makeCsv(3)), {
      title: "ipd",
      reference: -2,
    });
    const svg = renderFigure([panel]);
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg.match(/class="mean"/g)).toHaveLength(2);
    expect(svg.match(/class="band"/g)).toHaveLength(2);
    expect(svg).toContain('stroke-dasharray="3,3"');
    expect(svg).toContain("seat 0 (fcl)");
    expect(svg).toContain("seat 1 (q)");
  });

  it("omits the band for a single run and the reference when absent", () => {
    const panel = buildPanel(parseResultCsv(makeCsv(1)), { title: "solo" });
    const svg = renderFigure([panel]);
    expect(svg.match(/class="mean"/g)).toHaveLength(2);
    expect(svg).not.toContain('class="band"');
    expect(svg).not.toContain("stroke-dasharray");
  });

  it("filters by seat and algorithm", () => {
    const rows = parseResultCsv(makeCsv(2));
    const bySeat = buildPanel(rows, { title: "x", seats: [1] });
    expect(bySeat.curves).toHaveLength(1);
    expect(bySeat.curves[0].label).toBe("seat 1 (q)");
    const byAlgo = buildPanel(rows, { title: "x", algos: ["fcl"] });
    expect(byAlgo.curves).toHaveLength(1);
    expect(() => buildPanel(rows, { title: "x", algos: ["pg"] })).toThrow(SchemaError);
  });

  it("renders multiple panels side by side", () => {
    const rows = parseResultCsv(makeCsv(2));
    const svg = renderFigure([
      buildPanel(rows, { title: "left" }),
      buildPanel(rows, { title: "right" }),
    ]);
    expect(svg).toContain(">left<");
    expect(svg).toContain(">right<");
    expect(svg).toContain('width="840"');
  });
});

describe("cli", () => {
  const tmp = mkdtempSync(join(tmpdir(), "plotgen-"));
  afterAll(() => rmSync(tmp, { recursive: true, force: true }));

  it("parses repeated and optional flags", () => {
    const options = parseArgs([
      "--csv", "a.csv", "--csv", "b.csv", "--output", "out.svg",
      "--seat", "0", "--seat", "1", "--window", "5", "--reference", "-2",
      "--title", "A,B",
    ]);
    expect(options.csvPaths).toEqual(["a.csv", "b.csv"]);
    expect(options.seats).toEqual([0, 1]);
    expect(options.window).toBe(5);
    expect(options.reference).toBe(-2);
    expect(options.titles).toEqual(["A", "B"]);
  });

  it("rejects bad invocations", () => {
    expect(() => parseArgs([])).toThrow(/--csv/);
    expect(() => parseArgs(["--csv", "a.csv"])).toThrow(/--output/);
    expect(() => parseArgs(["--wat"])).toThrow(/unknown flag/);
    expect(() => parseArgs(["--csv", "a.csv", "--output", "o", "--window", "x"])).toThrow(
      /integer/,
    );
  });

  it("writes an SVG from a CSV end to end", () => {
    const csvPath = join(tmp, "curves.csv");
    const outPath = join(tmp, "curves.svg");
    writeFileSync(csvPath, makeCsv(2));
    expect(run(["--csv", csvPath, "--output", outPath, "--reference", "-2"])).toBe(0);
    const svg = readFileSync(outPath, "utf8");
    expect(svg).toContain("</svg>");
    expect(svg).toContain('stroke-dasharray="3,3"');
  });

  it("reports schema and file errors without throwing", () => {
    const badPath = join(tmp, "bad.csv");
    writeFileSync(badPath, "nope\n1,2\n");
    expect(run(["--csv", badPath, "--output", join(tmp, "x.svg")])).toBe(1);
    expect(run(["--csv", join(tmp, "missing.csv"), "--output", join(tmp, "x.svg")])).toBe(1);
  });
});
