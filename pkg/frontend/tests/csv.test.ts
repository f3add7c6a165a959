import { describe, expect, it } from "vitest";
import { CSV_HEADER, parseResultCsv, SchemaError } from "../src/csv.js";

const SAMPLE = [
  CSV_HEADER,
  "0,0,0,fcl,-1,-1",
  "0,0,1,q,-1.5,-1.5",
  "0,1,0,fcl,-2,-1.5",
  "0,1,1,q,0,-0.75",
  "",
].join("\n");

describe("parseResultCsv", () => {
  it("parses rows with typed fields", () => {
    const rows = parseResultCsv(SAMPLE);
    expect(rows).toHaveLength(4);
    expect(rows[1]).toEqual({
      run: 0,
      stage: 0,
      seat: 1,
      algo: "q",
      stageReturn: -1.5,
      cumAvg: -1.5,
    });
  });

  it("rejects a foreign header", () => {
    expect(() => parseResultCsv("time,value\n0,1\n")).toThrow(SchemaError);
    expect(() => parseResultCsv("")).toThrow(/header/);
  });

  it("rejects short and non-numeric rows", () => {
    expect(() => parseResultCsv(`${CSV_HEADER}\n0,0,0,fcl,-1\n`)).toThrow(/6 columns/);
    expect(() => parseResultCsv(`${CSV_HEADER}\n0,x,0,fcl,-1,-1\n`)).toThrow(/non-numeric/);
    expect(() => parseResultCsv(`${CSV_HEADER}\n0,0.5,0,fcl,-1,-1\n`)).toThrow(/integers/);
  });

  it("accepts scientific-notation returns", () => {
    const rows = parseResultCsv(`${CSV_HEADER}\n0,0,0,fcl,1.5e-3,1.5e-3\n`);
    expect(rows[0].stageReturn).toBeCloseTo(0.0015, 12);
  });
});
