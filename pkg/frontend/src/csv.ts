import { readFileSync } from "node:fs";
import Papa from "papaparse";

export type Row = Record<string, string | number | boolean | null>;

/** Parse CSV text with a header row into typed records. */
export function parseTable(text: string): Row[] {
  const result = Papa.parse<Row>(text.trim(), {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (result.errors.length > 0) {
    const first = result.errors[0];
    throw new Error(`CSV parse error at row ${first.row}: ${first.message}`);
  }
  return result.data;
}

export function loadTable(path: string): Row[] {
  return parseTable(readFileSync(path, "utf8"));
}

/** Extract one column as finite numbers, failing loudly on anything else. */
export function numericColumn(rows: Row[], name: string): number[] {
  return rows.map((row, i) => {
    let value = row[name];
    // papaparse keeps magnitudes beyond 2^53 as strings; coerce those here
    if (typeof value === "string" && value.trim() !== "") value = Number(value);
    if (typeof value !== "number" || Number.isNaN(value)) {
      throw new Error(`column '${name}' row ${i}: expected a number, got ${JSON.stringify(row[name])}`);
    }
    return value;
  });
}

/** growth.csv is a (constant, value) key table; turn it into a lookup. */
export function keyValueTable(rows: Row[]): Map<string, number> {
  const out = new Map<string, number>();
  for (const row of rows) {
    const key = row["constant"];
    const value = row["value"];
    if (typeof key !== "string") continue;
    if (typeof value === "number") {
      out.set(key, value);
    } else if (typeof value === "boolean") {
      out.set(key, value ? 1 : 0);
    }
  }
  return out;
}
