import type { Row } from "./csv.js";
import { numericColumn } from "./csv.js";
import { envelopeValue, logSquareFit } from "./fit.js";
import { Chart } from "./svg.js";

const BLUE = "#4682b4";
const ORANGE = "#e07a30";
const GREEN = "#2e8b57";
const PALETTE = [BLUE, ORANGE, GREEN, "#7b45a0", "#c23b3b", "#2aa198", "#8a6d3b", "#5a5a5a"];

function magnitudes(rows: Row[], reName: string, imName: string): number[] {
  const re = numericColumn(rows, reName);
  const im = numericColumn(rows, imName);
  return re.map((r, i) => Math.hypot(r, im[i]));
}

function logSpaced(lo: number, hi: number, count: number): number[] {
  const a = Math.log(lo);
  const step = (Math.log(hi) - Math.log(lo)) / (count - 1);
  return Array.from({ length: count }, (_, i) => Math.exp(a + i * step));
}

/** Sector-to-sector difference against eps, with the flat-decay fit overlaid. */
export function cocycleChart(rows: Row[]): string {
  const eps = numericColumn(rows, "eps");
  const diff = numericColumn(rows, "difference");
  const fit = logSquareFit(eps, diff);
  const curveX = logSpaced(Math.min(...eps), Math.max(...eps), 50);
  const curveY = curveX.map((e) => Math.exp(fit.intercept - fit.rate * Math.log(e) ** 2));
  const chart = new Chart(
    {
      title: "Cocycle decay across a sector overlap",
      xLabel: "eps",
      yLabel: "sup |X_i - X_j|",
      xLog: true,
      yLog: true,
    },
    eps,
    diff.concat(curveY),
  );
  chart.dots(eps, diff, BLUE);
  chart.line(curveX, curveY, ORANGE, true);
  chart.legend("measured", BLUE);
  chart.legend(`fit: rate ${fit.rate.toFixed(4)}`, ORANGE);
  return chart.render();
}

/** Agreement gap between the two summation routes, with the shared tail bound. */
export function dirichletChart(rows: Row[]): string {
  const eps = numericColumn(rows, "eps");
  const gap = numericColumn(rows, "gap").map((g) => (g > 0 ? g : NaN));
  const tail = numericColumn(rows, "tail_bound");
  const chart = new Chart(
    {
      title: "Dirichlet series: direct vs Euler-Maclaurin",
      xLabel: "eps",
      yLabel: "route gap",
      xLog: true,
      yLog: true,
    },
    eps,
    gap.concat(tail),
  );
  chart.dots(eps, gap, BLUE);
  chart.line(eps, tail, GREEN, true);
  chart.legend("|direct - EM|", BLUE);
  chart.legend("direct tail bound", GREEN);
  return chart.render();
}

/** Outer and inner norms per order with their fitted factorial envelopes. */
export function normsChart(rows: Row[], growth: Map<string, number>): string {
  for (const key of ["C13", "C14", "C23", "C24", "delta_series"]) {
    if (!growth.has(key)) throw new Error(`growth table is missing '${key}'`);
  }
  const beta = numericColumn(rows, "beta");
  const outer = numericColumn(rows, "outer");
  const inner = numericColumn(rows, "inner");
  const delta = growth.get("delta_series")!;
  const outerEnv = beta.map((b) => envelopeValue(b, growth.get("C13")!, growth.get("C14")!, delta));
  const innerEnv = beta.map((b) => envelopeValue(b, growth.get("C23")!, growth.get("C24")!, delta));
  const positive = (v: number) => (v > 0 ? v : NaN);
  const chart = new Chart(
    {
      title: "Coefficient norms and growth envelopes",
      xLabel: "order",
      yLabel: "weighted sup norm",
      yLog: true,
    },
    beta,
    outer.map(positive).concat(inner.map(positive), outerEnv, innerEnv),
  );
  chart.dots(beta, outer.map(positive), BLUE);
  chart.dots(beta, inner.map(positive), ORANGE);
  chart.line(beta, outerEnv, BLUE, true);
  chart.line(beta, innerEnv, ORANGE, true);
  chart.legend("outer norm", BLUE);
  chart.legend("inner norm", ORANGE);
  return chart.render();
}

/** Magnitude of every stored expansion coefficient, one polyline per order. */
export function borelLedgerChart(rows: Row[]): string {
  const beta = numericColumn(rows, "beta");
  const index = numericColumn(rows, "index");
  const mag = magnitudes(rows, "re", "im").map((m) => (m > 0 ? m : NaN));
  const chart = new Chart(
    {
      title: "Borel coefficient magnitudes by order",
      xLabel: "pole ledger index",
      yLabel: "|coefficient|",
      yLog: true,
    },
    index,
    mag,
  );
  const orders = [...new Set(beta)].sort((a, b) => a - b);
  for (const b of orders) {
    const xs: number[] = [];
    const ys: number[] = [];
    for (let i = 0; i < beta.length; i++) {
      if (beta[i] === b) {
        xs.push(index[i]);
        ys.push(mag[i]);
      }
    }
    const color = PALETTE[orders.indexOf(b) % PALETTE.length];
    chart.line(xs, ys, color);
    chart.dots(xs, ys, color, 2);
  }
  return chart.render();
}

/** Relative equation residual per sample point. */
export function residualChart(rows: Row[]): string {
  const rel = numericColumn(rows, "rel").map((v) => (v > 0 ? v : NaN));
  const sample = rel.map((_, i) => i);
  const chart = new Chart(
    {
      title: "Relative equation residual per sample",
      xLabel: "sample",
      yLabel: "relative residual",
      yLog: true,
    },
    sample,
    rel,
  );
  chart.dots(sample, rel, BLUE, 4);
  return chart.render();
}

/** Expansion remainders per truncation order, with bounds where available. */
export function asymptoticsChart(rows: Row[]): string {
  const order = numericColumn(rows, "order");
  const remainder = numericColumn(rows, "remainder").map((v) => (v > 0 ? v : NaN));
  const bound = rows.map((r) => (typeof r["bound"] === "number" && r["bound"] > 0 ? r["bound"] : NaN));
  const haveBounds = bound.some(Number.isFinite);
  const chart = new Chart(
    {
      title: "Expansion remainders by truncation order",
      xLabel: "truncation order",
      yLabel: "worst remainder over eps",
      yLog: true,
    },
    order,
    remainder.concat(bound),
  );
  chart.dots(order, remainder, BLUE, 4);
  chart.legend("remainder", BLUE);
  if (haveBounds) {
    chart.line(order, bound, ORANGE, true);
    chart.legend("q-Gevrey bound", ORANGE);
  } else {
    chart.legend("bounds: below noise floor", "#aaaaaa");
  }
  return chart.render();
}

/** Laplace-transform coefficient magnitudes against the admissible envelope. */
export function cauchyHeineChart(rows: Row[]): string {
  const m = numericColumn(rows, "m");
  const alpha = magnitudes(rows, "alpha_re", "alpha_im").map((v) => (v > 0 ? v : NaN));
  const envelope = numericColumn(rows, "envelope");
  const chart = new Chart(
    {
      title: "Cocycle moment coefficients vs envelope",
      xLabel: "moment index",
      yLabel: "magnitude",
      yLog: true,
    },
    m,
    alpha.concat(envelope),
  );
  chart.dots(m, alpha, BLUE, 4);
  chart.line(m, envelope, GREEN, true);
  chart.legend("|alpha_m|", BLUE);
  chart.legend("envelope", GREEN);
  return chart.render();
}

/** Common-expansion coefficients recovered from the reconstruction step. */
export function reconstructionChart(rows: Row[]): string {
  const m = numericColumn(rows, "m");
  const phi = magnitudes(rows, "phi_re", "phi_im");
  const chart = new Chart(
    {
      title: "Reconstructed expansion coefficients",
      xLabel: "order",
      yLabel: "|phi_m|",
    },
    m,
    phi,
  );
  chart.line(m, phi, BLUE);
  chart.dots(m, phi, BLUE, 4);
  return chart.render();
}
