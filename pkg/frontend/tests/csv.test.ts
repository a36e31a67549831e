import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";
import { keyValueTable, loadTable, numericColumn, parseTable } from "../src/csv.js";

const FIXTURES = fileURLToPath(new URL("./fixtures/run", import.meta.url));

describe("parseTable", () => {
  it("types numbers, booleans and empty cells", () => {
    const rows = parseTable("a,b,passed\n1,0.5,true\n-2e-3,,false\n");
    expect(rows).toEqual([
      { a: 1, b: 0.5, passed: true },
      { a: -0.002, b: null, passed: false },
    ]);
  });

  it("fails on ragged rows", () => {
    expect(() => parseTable("a,b\n1,2,3\n")).toThrow(/row 0/);
  });
});

describe("numericColumn", () => {
  it("extracts finite numbers", () => {
    const rows = parseTable("x,y\n1,2\n3,4\n");
    expect(numericColumn(rows, "y")).toEqual([2, 4]);
  });

  it("rejects missing or empty entries", () => {
    const rows = parseTable("x,y\n1,2\n3,\n");
    expect(() => numericColumn(rows, "y")).toThrow(/row 1/);
    expect(() => numericColumn(rows, "z")).toThrow(/'z'/);
  });
});

describe("keyValueTable", () => {
  it("keeps numeric entries and coerces booleans", () => {
    const rows = parseTable("constant,value\nC13,2.5\ndropped,0\ndegenerate,false\n");
    const table = keyValueTable(rows);
    expect(table.get("C13")).toBe(2.5);
    expect(table.get("degenerate")).toBe(0);
  });
});

describe("loadTable on pipeline output", () => {
  it("reads every fixture produced by the pipeline run", () => {
    const cocycle = loadTable(join(FIXTURES, "cocycle.csv"));
    expect(cocycle.length).toBeGreaterThanOrEqual(5);
    expect(numericColumn(cocycle, "eps").every((e) => e > 0)).toBe(true);
    expect(numericColumn(cocycle, "difference").every(Number.isFinite)).toBe(true);

    const growth = keyValueTable(loadTable(join(FIXTURES, "growth.csv")));
    for (const key of ["C13", "C14", "C23", "C24", "delta_series"]) {
      expect(growth.get(key)).toBeGreaterThan(0);
    }
  });
});
