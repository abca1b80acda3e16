/** Figure renderers over the harness CSV schemas.
 *
 * Every scientific number is read from a primary-component CSV or meta JSON;
 * the only arithmetic here is axis transforms (the histogram rescaling
 * constants and the alpha overlay rescaling, both explicit parameters,
 * default 1).  A missing column aborts before any output is produced.
 */

import { readFileSync } from "node:fs";

import { numericColumn, readCsv, type Table } from "./csv.js";
import { extent, Scene } from "./svg.js";

export interface ValueDistOptions {
  /** multiply the histogram axes by these before drawing (default 1, the
   * compensation knob for the omitted arithmetic factor) */
  rescaleX?: number;
  rescaleY?: number;
}

/** Value-distribution histogram with the model density overlaid. */
export function valueDistribution(
  histogramCsv: string,
  densityCsv: string,
  opts: ValueDistOptions = {},
): string {
  const rx = opts.rescaleX ?? 1.0;
  const ry = opts.rescaleY ?? 1.0;
  const hist = readCsv(histogramCsv);
  const model = readCsv(densityCsv);
  const lefts = numericColumn(hist, "bin_left").map((v) => v * rx);
  const rights = numericColumn(hist, "bin_right").map((v) => v * rx);
  const dens = numericColumn(hist, "density").map((v) => v * ry);
  const mt = numericColumn(model, "t");
  const md = numericColumn(model, "density");
  const xs = extent([...lefts, ...rights, ...mt]);
  const ys = extent([0, ...dens, ...md]);
  const scene = new Scene(xs, ys);
  scene.bars(lefts, rights, dens);
  scene.polyline(mt, md);
  return scene.render("Central-value distribution vs SO(2N) density", "L(1, chi_d)", "density");
}

export interface CltOverlayOptions {
  /** overlay the model as alpha * p(alpha t) (the visual-fit convention) */
  alpha?: number;
}

/** CLT-transform histogram with the SO(2N) model (alpha-rescaled) and the
 * Gaussian limit overlaid. */
export function cltOverlay(
  histogramCsv: string,
  cltDensityCsv: string,
  gaussianCsv: string,
  opts: CltOverlayOptions = {},
): string {
  const alpha = opts.alpha ?? 1.0;
  const hist = readCsv(histogramCsv);
  const model = readCsv(cltDensityCsv);
  const gauss = readCsv(gaussianCsv);
  const lefts = numericColumn(hist, "bin_left");
  const rights = numericColumn(hist, "bin_right");
  const dens = numericColumn(hist, "density");
  // alpha p(alpha t): samples (t_i, p_i) map to (t_i / alpha, alpha p_i)
  const mt = numericColumn(model, "t").map((v) => v / alpha);
  const md = numericColumn(model, "density").map((v) => v * alpha);
  const gt = numericColumn(gauss, "t");
  const gd = numericColumn(gauss, "density");
  const xs = extent([...lefts, ...rights, ...gt]);
  const ys = extent([0, ...dens, ...md, ...gd]);
  const scene = new Scene(xs, ys);
  scene.bars(lefts, rights, dens);
  scene.polyline(mt, md, "#d62728");
  scene.polyline(gt, gd, "#2ca02c");
  return scene.render(
    `log-value CLT transform vs model (alpha=${alpha}) and Gaussian`,
    "(log L + (1/2) log log|d|)/sqrt(log log|d|)",
    "density",
  );
}

/** Per-q deviation of the empirical vanishing ratio from a prediction. */
export function rqScatter(rqCsv: string, which: "main" | "refined"): string {
  const table = readCsv(rqCsv);
  const qs = numericColumn(table, "q");
  const deltaCol = which === "main" ? "delta_main" : "delta_refined";
  const idx = table.columns.indexOf(deltaCol);
  if (idx < 0) throw new Error(`missing column ${deltaCol}`);
  const pts: { q: number; d: number }[] = [];
  table.rows.forEach((row, i) => {
    const v = row[idx];
    if (v !== null) pts.push({ q: qs[i], d: v });
  });
  if (pts.length === 0) throw new Error("no defined ratio deltas to plot");
  const xs = extent(pts.map((p) => p.q));
  const ys = extent([0, ...pts.map((p) => p.d)]);
  const scene = new Scene(xs, ys);
  scene.hline(0);
  scene.scatter(pts.map((p) => p.q), pts.map((p) => p.d));
  return scene.render(`R_q deviation from ${which} prediction`, "q", "R_q(X) - prediction");
}

/** Strip view of the two delta populations (main vs refined), one mark per
 * prime q; the refined strip should hug zero more tightly. */
export function rqDeltaStrips(rqCsv: string): string {
  const table = readCsv(rqCsv);
  const grab = (name: string) => {
    const idx = table.columns.indexOf(name);
    if (idx < 0) throw new Error(`missing column ${name}`);
    return table.rows.map((r) => r[idx]).filter((v): v is number => v !== null);
  };
  const main = grab("delta_main");
  const refined = grab("delta_refined");
  const xs = extent([0, ...main, ...refined]);
  const scene = new Scene(xs, { min: 0, max: 3 });
  scene.hline(0);
  scene.scatter(main, main.map(() => 2), "#1f77b4");
  scene.scatter(refined, refined.map(() => 1), "#d62728");
  return scene.render(
    "R_q deltas: main (top) vs refined (bottom)",
    "R_q(X) - prediction",
    "",
  );
}

/** Normalised vanishing-frequency curves, one per input CSV (flat is good). */
export function vanishingCurves(vanishCsvs: string[]): string {
  const series = vanishCsvs.map((path) => {
    const t = readCsv(path);
    return { x: numericColumn(t, "X"), y: numericColumn(t, "normalized"), path };
  });
  const xs = extent(series.flatMap((s) => s.x));
  const ys = extent([0, ...series.flatMap((s) => s.y.filter(Number.isFinite))]);
  const scene = new Scene(xs, ys);
  const palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"];
  series.forEach((s, i) => scene.polyline(s.x, s.y, palette[i % palette.length]));
  return scene.render("Normalised vanishing frequency", "X", "fraction / (A sqrt(kappa) X^-1/4 log^3/8 X)");
}

interface VanishMeta {
  curve: string;
  slope: number | null;
  torsion_order: number | null;
}

function readMeta(path: string): VanishMeta {
  const raw = JSON.parse(readFileSync(path, "utf-8"));
  for (const key of ["curve", "slope"]) {
    if (!(key in raw)) throw new Error(`meta ${path}: missing ${key}`);
  }
  return raw as VanishMeta;
}

/** One mark per curve: the end-slope of its normalised vanishing curve. */
export function vanishingSlopes(metaPaths: string[]): string {
  const metas = metaPaths.map(readMeta);
  const slopes = metas.map((m) => m.slope).filter((v): v is number => v !== null);
  if (slopes.length === 0) throw new Error("no slopes available");
  const xs = extent([-1, slopes.length]);
  const ys = extent([0, ...slopes]);
  const scene = new Scene(xs, ys);
  scene.hline(0);
  scene.scatter(slopes.map((_, i) => i), slopes);
  return scene.render("End slopes of normalised vanishing curves", "curve index", "slope");
}

/** Rightmost normalised value against the torsion order (curve metadata). */
export function torsionScatter(pairs: { vanishCsv: string; metaJson: string }[]): string {
  const pts: { t: number; v: number }[] = [];
  for (const pair of pairs) {
    const meta = readMeta(pair.metaJson);
    if (meta.torsion_order == null) continue;
    const table = readCsv(pair.vanishCsv);
    const norm = numericColumn(table, "normalized");
    pts.push({ t: meta.torsion_order, v: norm[norm.length - 1] });
  }
  if (pts.length === 0) throw new Error("no curves with torsion metadata");
  const xs = extent([0, ...pts.map((p) => p.t)]);
  const ys = extent([0, ...pts.map((p) => p.v)]);
  const scene = new Scene(xs, ys);
  scene.scatter(pts.map((p) => p.t), pts.map((p) => p.v));
  return scene.render("Normalised vanishing level vs torsion order", "torsion order", "rightmost normalised value");
}
