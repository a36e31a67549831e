import { scaleLinear, scaleLog, type ScaleContinuousNumeric } from "d3-scale";
import { extent } from "d3-array";

export interface ChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  width?: number;
  height?: number;
  xLog?: boolean;
  yLog?: boolean;
}

const MARGIN = { top: 36, right: 16, bottom: 42, left: 64 };

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function px(v: number): string {
  return v.toFixed(2);
}

/** Pad a domain slightly so points do not sit on the frame edge. */
function padDomain(lo: number, hi: number, log: boolean): [number, number] {
  if (log) {
    const f = (hi / lo) ** 0.05;
    return [lo / f, hi * f];
  }
  const pad = (hi - lo || Math.abs(hi) || 1) * 0.05;
  return [lo - pad, hi + pad];
}

function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  const a = Math.ceil(Math.log10(lo) - 1e-9);
  const b = Math.floor(Math.log10(hi) + 1e-9);
  const step = Math.max(1, Math.ceil((b - a) / 7));
  for (let k = a; k <= b; k += step) ticks.push(10 ** k);
  return ticks;
}

function tickLabel(v: number, log: boolean): string {
  if (log) return v.toExponential(0).replace("e+0", "e").replace("e-0", "e-").replace("e+", "e");
  const a = Math.abs(v);
  if (a !== 0 && (a >= 1e4 || a < 1e-3)) return v.toExponential(1);
  return String(Number(v.toPrecision(4)));
}

export class Chart {
  readonly width: number;
  readonly height: number;
  private readonly opts: ChartOptions;
  private readonly xScale: ScaleContinuousNumeric<number, number>;
  private readonly yScale: ScaleContinuousNumeric<number, number>;
  private readonly marks: string[] = [];
  private readonly legends: string[] = [];

  constructor(opts: ChartOptions, xValues: number[], yValues: number[]) {
    this.opts = opts;
    this.width = opts.width ?? 560;
    this.height = opts.height ?? 360;
    const [x0, x1] = extent(xValues.filter(Number.isFinite)) as [number, number];
    const [y0, y1] = extent(yValues.filter(Number.isFinite)) as [number, number];
    if (x0 === undefined || y0 === undefined) throw new Error(`chart '${opts.title}' has no finite data`);
    const make = (log: boolean | undefined, lo: number, hi: number, range: [number, number]) =>
      (log ? scaleLog() : scaleLinear()).domain(padDomain(lo, hi, !!log)).range(range);
    this.xScale = make(opts.xLog, x0, x1, [MARGIN.left, this.width - MARGIN.right]);
    this.yScale = make(opts.yLog, y0, y1, [this.height - MARGIN.bottom, MARGIN.top]);
  }

  x(v: number): number {
    return this.xScale(v);
  }

  y(v: number): number {
    return this.yScale(v);
  }

  dots(xs: number[], ys: number[], fill: string, r = 3): this {
    for (let i = 0; i < xs.length; i++) {
      if (!Number.isFinite(xs[i]) || !Number.isFinite(ys[i])) continue;
      this.marks.push(`<circle cx="${px(this.x(xs[i]))}" cy="${px(this.y(ys[i]))}" r="${r}" fill="${fill}" fill-opacity="0.75"/>`);
    }
    return this;
  }

  line(xs: number[], ys: number[], stroke: string, dashed = false): this {
    const pts: string[] = [];
    for (let i = 0; i < xs.length; i++) {
      if (Number.isFinite(xs[i]) && Number.isFinite(ys[i])) {
        pts.push(`${px(this.x(xs[i]))},${px(this.y(ys[i]))}`);
      }
    }
    if (pts.length < 2) return this;
    const dash = dashed ? ' stroke-dasharray="5 3"' : "";
    this.marks.push(`<polyline points="${pts.join(" ")}" fill="none" stroke="${stroke}" stroke-width="1.5"${dash}/>`);
    return this;
  }

  legend(label: string, color: string): this {
    const y = MARGIN.top + 6 + this.legends.length * 16;
    const x = this.width - MARGIN.right - 150;
    this.legends.push(
      `<rect x="${x}" y="${y}" width="10" height="10" fill="${color}"/>` +
      `<text x="${x + 15}" y="${y + 9}" font-size="11">${esc(label)}</text>`,
    );
    return this;
  }

  private axes(): string {
    const parts: string[] = [];
    const bottom = this.height - MARGIN.bottom;
    parts.push(`<line x1="${MARGIN.left}" y1="${bottom}" x2="${this.width - MARGIN.right}" y2="${bottom}" stroke="black"/>`);
    parts.push(`<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${bottom}" stroke="black"/>`);
    const xDomain = this.xScale.domain();
    const yDomain = this.yScale.domain();
    const xTicks = this.opts.xLog ? decadeTicks(xDomain[0], xDomain[1]) : this.xScale.ticks(6);
    const yTicks = this.opts.yLog ? decadeTicks(yDomain[0], yDomain[1]) : this.yScale.ticks(6);
    for (const t of xTicks) {
      const xp = px(this.x(t));
      parts.push(`<line x1="${xp}" y1="${bottom}" x2="${xp}" y2="${bottom + 5}" stroke="black"/>`);
      parts.push(`<text x="${xp}" y="${bottom + 18}" font-size="11" text-anchor="middle">${tickLabel(t, !!this.opts.xLog)}</text>`);
    }
    for (const t of yTicks) {
      const yp = px(this.y(t));
      parts.push(`<line x1="${MARGIN.left - 5}" y1="${yp}" x2="${MARGIN.left}" y2="${yp}" stroke="black"/>`);
      parts.push(`<text x="${MARGIN.left - 8}" y="${yp}" dy="4" font-size="11" text-anchor="end">${tickLabel(t, !!this.opts.yLog)}</text>`);
    }
    return parts.join("\n");
  }

  render(): string {
    const midX = (MARGIN.left + this.width - MARGIN.right) / 2;
    const midY = (MARGIN.top + this.height - MARGIN.bottom) / 2;
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" font-family="sans-serif">`,
      `<rect width="${this.width}" height="${this.height}" fill="white"/>`,
      `<text x="${midX}" y="20" font-size="14" text-anchor="middle" font-weight="bold">${esc(this.opts.title)}</text>`,
      this.axes(),
      `<text x="${midX}" y="${this.height - 8}" font-size="12" text-anchor="middle">${esc(this.opts.xLabel)}</text>`,
      `<text x="16" y="${midY}" font-size="12" text-anchor="middle" transform="rotate(-90 16 ${midY})">${esc(this.opts.yLabel)}</text>`,
      ...this.marks,
      ...this.legends,
      "</svg>",
    ].join("\n");
  }
}
