/** Panel plotting on top of the scene graph: axes, series, bars, boxes. */

import { circle, line, newScene, polyline, rect, Scene, text, textWidth } from "./scene.js";
import { linearScale, logScale, Scale, tickLabel } from "./scales.js";

export const PALETTE = ["#1f6fb4", "#d95f02", "#2ca25f", "#7b4fa3", "#c22222", "#666666"];

export interface PanelSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  xDomain: [number, number];
  yDomain: [number, number];
  xLog?: boolean;
  width?: number;
  height?: number;
}

export interface Panel {
  scene: Scene;
  x: Scale;
  y: Scale;
  plotBox: { x0: number; y0: number; x1: number; y1: number };
}

const MARGIN = { top: 28, right: 14, bottom: 40, left: 52 };

export function newPanel(spec: PanelSpec): Panel {
  const W = spec.width ?? 360;
  const H = spec.height ?? 270;
  const scene = newScene(W, H);
  const box = { x0: MARGIN.left, y0: MARGIN.top, x1: W - MARGIN.right, y1: H - MARGIN.bottom };
  const x = (spec.xLog ? logScale : linearScale)(spec.xDomain, [box.x0, box.x1]);
  const y = linearScale(spec.yDomain, [box.y1, box.y0]);

  rect(scene, box.x0, box.y0, box.x1 - box.x0, box.y1 - box.y0,
       { stroke: "#000000", strokeWidth: 1, fill: "none" });
  for (const tv of x.ticks(6)) {
    const px = x.toPx(tv);
    line(scene, px, box.y1, px, box.y1 + 4, { stroke: "#000000", strokeWidth: 1 });
    text(scene, px, box.y1 + 15, tickLabel(tv), { fontSize: 9, anchor: "middle" });
  }
  for (const tv of y.ticks(5)) {
    const py = y.toPx(tv);
    line(scene, box.x0 - 4, py, box.x0, py, { stroke: "#000000", strokeWidth: 1 });
    text(scene, box.x0 - 6, py, tickLabel(tv), { fontSize: 9, anchor: "end", baseline: "middle" });
    line(scene, box.x0, py, box.x1, py, { stroke: "#dddddd", strokeWidth: 0.5 });
  }
  text(scene, (box.x0 + box.x1) / 2, 16, spec.title, { fontSize: 11, anchor: "middle" });
  text(scene, (box.x0 + box.x1) / 2, H - 8, spec.xLabel, { fontSize: 10, anchor: "middle" });
  text(scene, 14, (box.y0 + box.y1) / 2, spec.yLabel,
       { fontSize: 10, anchor: "middle", rotate: -90 });
  return { scene, x, y, plotBox: box };
}

export function lineSeries(p: Panel, xs: number[], ys: number[], color: string,
                           opts: { dash?: number[]; width?: number; markers?: boolean } = {}): void {
  const pts: [number, number][] = xs.map((v, i) => [p.x.toPx(v), p.y.toPx(ys[i])]);
  polyline(p.scene, pts, { stroke: color, strokeWidth: opts.width ?? 1.5, dash: opts.dash });
  if (opts.markers) {
    for (const [px, py] of pts) circle(p.scene, px, py, 2, { fill: color, stroke: "none" });
  }
}

export function hLine(p: Panel, yValue: number, color: string, dash?: number[]): void {
  const py = p.y.toPx(yValue);
  line(p.scene, p.plotBox.x0, py, p.plotBox.x1, py,
       { stroke: color, strokeWidth: 1, dash: dash ?? [2, 3] });
}

/** Grouped bars: one cluster per x category, one bar per series. */
export function barGroups(p: Panel, categories: number[], series: number[][],
                          colors: string[], opts: { hollow?: boolean[] } = {}): void {
  const nCat = categories.length;
  const nSer = series.length;
  const box = p.plotBox;
  const slot = (box.x1 - box.x0) / nCat;
  const barW = (slot * 0.8) / nSer;
  categories.forEach((cat, ci) => {
    const left = box.x0 + ci * slot + slot * 0.1;
    for (let si = 0; si < nSer; si++) {
      const v = series[si][ci];
      if (!Number.isFinite(v)) continue;
      const py = p.y.toPx(v);
      const h = box.y1 - py;
      if (h <= 0) continue;
      const hollow = opts.hollow?.[si];
      rect(p.scene, left + si * barW, py, barW * 0.92, h,
           hollow ? { stroke: colors[si], strokeWidth: 1, fill: "none" }
                  : { fill: colors[si], stroke: "none" });
    }
    text(p.scene, box.x0 + ci * slot + slot / 2, box.y1 + 15, tickLabel(cat),
         { fontSize: 9, anchor: "middle" });
  });
}

/** A category-axis panel (bars): no numeric x ticks. */
export function newCategoryPanel(spec: Omit<PanelSpec, "xDomain" | "xLog"> & { nCats: number }): Panel {
  const W = spec.width ?? 360;
  const H = spec.height ?? 270;
  const scene = newScene(W, H);
  const box = { x0: MARGIN.left, y0: MARGIN.top, x1: W - MARGIN.right, y1: H - MARGIN.bottom };
  const x = linearScale([0, spec.nCats], [box.x0, box.x1]);
  const y = linearScale(spec.yDomain, [box.y1, box.y0]);
  rect(scene, box.x0, box.y0, box.x1 - box.x0, box.y1 - box.y0,
       { stroke: "#000000", strokeWidth: 1, fill: "none" });
  for (const tv of y.ticks(5)) {
    const py = y.toPx(tv);
    line(scene, box.x0 - 4, py, box.x0, py, { stroke: "#000000", strokeWidth: 1 });
    text(scene, box.x0 - 6, py, tickLabel(tv), { fontSize: 9, anchor: "end", baseline: "middle" });
    line(scene, box.x0, py, box.x1, py, { stroke: "#dddddd", strokeWidth: 0.5 });
  }
  text(scene, (box.x0 + box.x1) / 2, 16, spec.title, { fontSize: 11, anchor: "middle" });
  text(scene, (box.x0 + box.x1) / 2, H - 8, spec.xLabel, { fontSize: 10, anchor: "middle" });
  text(scene, 14, (box.y0 + box.y1) / 2, spec.yLabel,
       { fontSize: 10, anchor: "middle", rotate: -90 });
  return { scene, x, y, plotBox: box };
}

export interface BoxStats {
  q05: number;
  q25: number;
  q50: number;
  q75: number;
  q95: number;
}

export function boxGlyph(p: Panel, centerPx: number, widthPx: number, s: BoxStats,
                         color: string): void {
  const y = p.y;
  const half = widthPx / 2;
  line(p.scene, centerPx, y.toPx(s.q05), centerPx, y.toPx(s.q25),
       { stroke: color, strokeWidth: 1 });
  line(p.scene, centerPx, y.toPx(s.q75), centerPx, y.toPx(s.q95),
       { stroke: color, strokeWidth: 1 });
  rect(p.scene, centerPx - half, y.toPx(s.q75), widthPx, y.toPx(s.q25) - y.toPx(s.q75),
       { stroke: color, strokeWidth: 1, fill: "none" });
  line(p.scene, centerPx - half, y.toPx(s.q50), centerPx + half, y.toPx(s.q50),
       { stroke: color, strokeWidth: 1.5 });
}

export function legend(p: Panel, entries: { label: string; color: string; dash?: number[] }[],
                       corner: "ne" | "nw" = "ne"): void {
  const box = p.plotBox;
  const lineH = 12;
  const wMax = Math.max(...entries.map((e) => textWidth(e.label, 9))) + 26;
  const x0 = corner === "ne" ? box.x1 - wMax - 4 : box.x0 + 4;
  let y0 = box.y0 + 4;
  rect(p.scene, x0, y0, wMax, entries.length * lineH + 4,
       { fill: "#ffffff", stroke: "#999999", strokeWidth: 0.5 });
  y0 += 4;
  for (const e of entries) {
    line(p.scene, x0 + 3, y0 + 5, x0 + 19, y0 + 5,
         { stroke: e.color, strokeWidth: 2, dash: e.dash });
    text(p.scene, x0 + 23, y0 + 8, e.label, { fontSize: 9 });
    y0 += lineH;
  }
}
