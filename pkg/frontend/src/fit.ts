export interface LineFit {
  slope: number;
  intercept: number;
}

/** Drop pairs where either coordinate is not a finite number. */
export function cleanPairs(xs: number[], ys: number[]): [number[], number[]] {
  const fx: number[] = [];
  const fy: number[] = [];
  for (let i = 0; i < Math.min(xs.length, ys.length); i++) {
    if (Number.isFinite(xs[i]) && Number.isFinite(ys[i])) {
      fx.push(xs[i]);
      fy.push(ys[i]);
    }
  }
  return [fx, fy];
}

/** Ordinary least squares y = slope * x + intercept. */
export function linearFit(xs: number[], ys: number[]): LineFit {
  const [fx, fy] = cleanPairs(xs, ys);
  const n = fx.length;
  if (n < 2) throw new Error(`linear fit needs at least 2 finite points, got ${n}`);
  const mx = fx.reduce((a, b) => a + b, 0) / n;
  const my = fy.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    sxx += (fx[i] - mx) * (fx[i] - mx);
    sxy += (fx[i] - mx) * (fy[i] - my);
  }
  if (sxx === 0) throw new Error("linear fit is degenerate: all x values coincide");
  const slope = sxy / sxx;
  return { slope, intercept: my - slope * mx };
}

export interface LogSquareFit {
  /** Decay rate c in log v = intercept - c * (log eps)^2. */
  rate: number;
  intercept: number;
}

/**
 * Fit the flat-decay model v(eps) = exp(intercept - rate * log(eps)^2).
 * Non-positive values are dropped since they carry no magnitude information.
 */
export function logSquareFit(eps: number[], values: number[]): LogSquareFit {
  const xs: number[] = [];
  const ys: number[] = [];
  for (let i = 0; i < Math.min(eps.length, values.length); i++) {
    if (eps[i] > 0 && values[i] > 0) {
      xs.push(Math.log(eps[i]) ** 2);
      ys.push(Math.log(values[i]));
    }
  }
  const { slope, intercept } = linearFit(xs, ys);
  return { rate: -slope, intercept };
}

/** log(n!) by direct summation; orders here are small so this is exact enough. */
export function logFactorial(n: number): number {
  if (!Number.isInteger(n) || n < 0) throw new Error(`logFactorial expects a non-negative integer, got ${n}`);
  let acc = 0;
  for (let k = 2; k <= n; k++) acc += Math.log(k);
  return acc;
}

/**
 * Factorial growth envelope c * cp^beta * beta! * delta^-beta evaluated in
 * log space, matching the constants reported in growth.csv.
 */
export function envelopeValue(beta: number, c: number, cp: number, delta: number): number {
  return Math.exp(Math.log(c) + beta * Math.log(cp) + logFactorial(beta) - beta * Math.log(delta));
}
