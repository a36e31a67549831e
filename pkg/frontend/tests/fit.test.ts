import { describe, expect, it } from "vitest";
import { cleanPairs, envelopeValue, linearFit, logFactorial, logSquareFit } from "../src/fit.js";

describe("linearFit", () => {
  it("recovers an exact line", () => {
    const xs = [0, 1, 2, 3, 4];
    const ys = xs.map((x) => 2.5 * x - 1.25);
    const fit = linearFit(xs, ys);
    expect(fit.slope).toBeCloseTo(2.5, 12);
    expect(fit.intercept).toBeCloseTo(-1.25, 12);
  });

  it("averages symmetric noise away", () => {
    const xs = [0, 1, 2, 3];
    const ys = [0.1, 0.9, 2.1, 2.9];
    const fit = linearFit(xs, ys);
    // oracle: sxy/sxx = 4.8/5, intercept = 1.5 - 0.96 * 1.5
    expect(fit.slope).toBeCloseTo(0.96, 10);
    expect(fit.intercept).toBeCloseTo(0.06, 10);
  });

  it("rejects degenerate inputs", () => {
    expect(() => linearFit([1], [2])).toThrow(/at least 2/);
    expect(() => linearFit([3, 3, 3], [1, 2, 3])).toThrow(/coincide/);
    expect(() => linearFit([NaN, 1], [1, 2])).toThrow(/at least 2/);
  });
});

describe("cleanPairs", () => {
  it("drops pairs with a non-finite member on either side", () => {
    const [xs, ys] = cleanPairs([1, NaN, 3, 4], [10, 20, Infinity, 40]);
    expect(xs).toEqual([1, 4]);
    expect(ys).toEqual([10, 40]);
  });
});

describe("logSquareFit", () => {
  it("round-trips the flat decay model", () => {
    const eps = [1e-3, 3e-3, 1e-2, 3e-2, 1e-1, 0.3];
    const values = eps.map((e) => Math.exp(-1.7 - 0.35 * Math.log(e) ** 2));
    const fit = logSquareFit(eps, values);
    expect(fit.rate).toBeCloseTo(0.35, 10);
    expect(fit.intercept).toBeCloseTo(-1.7, 10);
  });

  it("ignores non-positive values", () => {
    const eps = [1e-3, 3e-3, 1e-2, 3e-2, 1e-1, 0.3, 0.5, 0.7];
    const values = eps.map((e) => Math.exp(-0.5 - 0.2 * Math.log(e) ** 2));
    values[6] = 0;
    values[7] = -1;
    const fit = logSquareFit(eps, values);
    expect(fit.rate).toBeCloseTo(0.2, 10);
  });
});

describe("logFactorial", () => {
  it("matches small factorials", () => {
    expect(logFactorial(0)).toBe(0);
    expect(logFactorial(1)).toBe(0);
    expect(logFactorial(5)).toBeCloseTo(Math.log(120), 12);
    expect(logFactorial(10)).toBeCloseTo(Math.log(3628800), 12);
  });

  it("rejects negative and fractional orders", () => {
    expect(() => logFactorial(-1)).toThrow();
    expect(() => logFactorial(2.5)).toThrow();
  });
});

describe("envelopeValue", () => {
  it("matches a hand-computed point", () => {
    // oracle: 2 * 0.5^3 * 3! * 0.5^-3 = 12
    expect(envelopeValue(3, 2, 0.5, 0.5)).toBeCloseTo(12, 10);
    expect(envelopeValue(0, 7.5, 0.3, 0.9)).toBeCloseTo(7.5, 12);
  });
});
