/** Minimal deterministic SVG scene builder: linear axes, bars, polylines,
 * and scatter marks.  Output depends only on the input data and options. */

export interface Extent {
  min: number;
  max: number;
}

export function extent(values: number[], pad = 0.05): Extent {
  if (values.length === 0) throw new Error("extent of empty data");
  let min = Infinity;
  let max = -Infinity;
  for (const v of values) {
    if (Number.isFinite(v)) {
      if (v < min) min = v;
      if (v > max) max = v;
    }
  }
  if (!Number.isFinite(min)) throw new Error("no finite values");
  const span = max - min || Math.abs(min) || 1;
  return { min: min - pad * span, max: max + pad * span };
}

export class Scene {
  readonly width: number;
  readonly height: number;
  private readonly margin = { left: 56, right: 16, top: 20, bottom: 40 };
  private readonly x: Extent;
  private readonly y: Extent;
  private parts: string[] = [];

  constructor(x: Extent, y: Extent, width = 640, height = 420) {
    this.width = width;
    this.height = height;
    this.x = x;
    this.y = y;
  }

  px(v: number): number {
    const w = this.width - this.margin.left - this.margin.right;
    return this.margin.left + ((v - this.x.min) / (this.x.max - this.x.min)) * w;
  }

  py(v: number): number {
    const h = this.height - this.margin.top - this.margin.bottom;
    return this.margin.top + h - ((v - this.y.min) / (this.y.max - this.y.min)) * h;
  }

  private fmt(v: number): string {
    return Number(v.toFixed(2)).toString();
  }

  bars(lefts: number[], rights: number[], heights: number[], fill = "#9ecae1"): void {
    const base = this.py(Math.max(this.y.min, 0));
    for (let i = 0; i < heights.length; i++) {
      const x0 = this.px(lefts[i]);
      const x1 = this.px(rights[i]);
      const y1 = this.py(heights[i]);
      const h = Math.max(0, base - y1);
      this.parts.push(
        `<rect x="${this.fmt(x0)}" y="${this.fmt(y1)}" width="${this.fmt(x1 - x0)}" ` +
          `height="${this.fmt(h)}" fill="${fill}" stroke="none"/>`,
      );
    }
  }

  polyline(xs: number[], ys: number[], stroke = "#d62728", widthPx = 1.5): void {
    const pts: string[] = [];
    for (let i = 0; i < xs.length; i++) {
      if (Number.isFinite(xs[i]) && Number.isFinite(ys[i])) {
        pts.push(`${this.fmt(this.px(xs[i]))},${this.fmt(this.py(ys[i]))}`);
      }
    }
    this.parts.push(
      `<polyline points="${pts.join(" ")}" fill="none" stroke="${stroke}" stroke-width="${widthPx}"/>`,
    );
  }

  scatter(xs: number[], ys: number[], fill = "#1f77b4", r = 2.5): void {
    for (let i = 0; i < xs.length; i++) {
      if (Number.isFinite(xs[i]) && Number.isFinite(ys[i])) {
        this.parts.push(
          `<circle cx="${this.fmt(this.px(xs[i]))}" cy="${this.fmt(this.py(ys[i]))}" r="${r}" fill="${fill}"/>`,
        );
      }
    }
  }

  hline(y: number, stroke = "#888", dash = "4 3"): void {
    this.parts.push(
      `<line x1="${this.fmt(this.px(this.x.min))}" y1="${this.fmt(this.py(y))}" ` +
        `x2="${this.fmt(this.px(this.x.max))}" y2="${this.fmt(this.py(y))}" ` +
        `stroke="${stroke}" stroke-dasharray="${dash}"/>`,
    );
  }

  render(title: string, xlabel: string, ylabel: string): string {
    const m = this.margin;
    const axisY = this.height - m.bottom;
    const ticks: string[] = [];
    for (let i = 0; i <= 5; i++) {
      const xv = this.x.min + (i / 5) * (this.x.max - this.x.min);
      const yv = this.y.min + (i / 5) * (this.y.max - this.y.min);
      ticks.push(
        `<text x="${this.fmt(this.px(xv))}" y="${axisY + 16}" font-size="10" text-anchor="middle">${xv.toPrecision(3)}</text>`,
        `<text x="${m.left - 6}" y="${this.fmt(this.py(yv) + 3)}" font-size="10" text-anchor="end">${yv.toPrecision(3)}</text>`,
      );
    }
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">`,
      `<rect width="${this.width}" height="${this.height}" fill="white"/>`,
      `<text x="${this.width / 2}" y="14" font-size="13" text-anchor="middle">${title}</text>`,
      `<line x1="${m.left}" y1="${axisY}" x2="${this.width - m.right}" y2="${axisY}" stroke="black"/>`,
      `<line x1="${m.left}" y1="${m.top}" x2="${m.left}" y2="${axisY}" stroke="black"/>`,
      `<text x="${this.width / 2}" y="${this.height - 6}" font-size="11" text-anchor="middle">${xlabel}</text>`,
      `<text x="14" y="${this.height / 2}" font-size="11" text-anchor="middle" transform="rotate(-90 14 ${this.height / 2})">${ylabel}</text>`,
      ...ticks,
      ...this.parts,
      `</svg>`,
    ].join("\n");
  }
}
