#!/usr/bin/env node
import { existsSync, mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { parseArgs } from "node:util";
import {
  asymptoticsChart,
  borelLedgerChart,
  cauchyHeineChart,
  cocycleChart,
  dirichletChart,
  normsChart,
  reconstructionChart,
  residualChart,
} from "./charts.js";
import { keyValueTable, loadTable, type Row } from "./csv.js";

interface ChartSpec {
  output: string;
  inputs: string[];
  build: (tables: Row[][]) => string;
}

export const CHARTS: ChartSpec[] = [
  { output: "cocycle.svg", inputs: ["cocycle.csv"], build: ([t]) => cocycleChart(t) },
  { output: "dirichlet.svg", inputs: ["dirichlet.csv"], build: ([t]) => dirichletChart(t) },
  { output: "norms.svg", inputs: ["norms.csv", "growth.csv"], build: ([n, g]) => normsChart(n, keyValueTable(g)) },
  { output: "borel_ledger.svg", inputs: ["borel_ledger.csv"], build: ([t]) => borelLedgerChart(t) },
  { output: "residual.svg", inputs: ["residual.csv"], build: ([t]) => residualChart(t) },
  { output: "asymptotics.svg", inputs: ["asymptotics.csv"], build: ([t]) => asymptoticsChart(t) },
  { output: "cauchy_heine.svg", inputs: ["cauchy_heine.csv"], build: ([t]) => cauchyHeineChart(t) },
  { output: "reconstruction.svg", inputs: ["reconstruction.csv"], build: ([t]) => reconstructionChart(t) },
];

/** Render every chart whose input CSVs exist under runDir; returns written paths. */
export function renderRunDirectory(runDir: string, outDir: string): string[] {
  const written: string[] = [];
  for (const spec of CHARTS) {
    const paths = spec.inputs.map((name) => join(runDir, name));
    if (!paths.every(existsSync)) continue;
    const svg = spec.build(paths.map(loadTable));
    mkdirSync(outDir, { recursive: true });
    const target = join(outDir, spec.output);
    writeFileSync(target, svg + "\n");
    written.push(target);
  }
  return written;
}

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: { out: { type: "string" } },
    });
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 2;
  }
  if (parsed.positionals.length !== 1) {
    console.error("usage: qgevrey-plots <run-dir> [--out <dir>]");
    return 2;
  }
  const runDir = parsed.positionals[0];
  if (!existsSync(runDir)) {
    console.error(`run directory not found: ${runDir}`);
    return 2;
  }
  const outDir = parsed.values.out ?? join(runDir, "plots");
  const written = renderRunDirectory(runDir, outDir);
  if (written.length === 0) {
    console.error(`no pipeline CSV files found in ${runDir}`);
    return 1;
  }
  for (const path of written) console.log(path);
  return 0;
}

const invokedDirectly = process.argv[1] && import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
