/**
 * Figure builders: each consumes the documented harness CSV contract
 * and yields one scene per panel, mirroring the source layouts
 * (diagnostic curves and priors in threes; per-alpha_bar panels in
 * fours; regularization paths with mean, MAP and the K0 = 3 line).
 */

import { loadJson, loadTable, num, Row, uniqueSorted } from "./csv.js";
import {
  barGroups,
  boxGlyph,
  BoxStats,
  hLine,
  legend,
  lineSeries,
  newCategoryPanel,
  newPanel,
  PALETTE,
  Panel,
} from "./plot.js";
import { Scene } from "./scene.js";

export interface PanelImage {
  id: string;
  scene: Scene;
}

export const FIGURE_IDS = ["fig2_top", "fig2_bottom", "fig3", "fig4", "fig5", "fig6", "fig7"] as const;
export type FigureId = (typeof FIGURE_IDS)[number];

const FAMILY_ORDER = ["DP", "PY", "NGG", "DMP"];

function tag(v: number | string): string {
  return String(v).replace(/\./g, "p").replace(/-/g, "m");
}

function groupBy(rows: Row[], col: string): Map<string, Row[]> {
  const m = new Map<string, Row[]>();
  for (const r of rows) {
    const k = r[col];
    if (!m.has(k)) m.set(k, []);
    m.get(k)!.push(r);
  }
  return m;
}

export function buildFigure(id: FigureId, dataDir: string): PanelImage[] {
  switch (id) {
    case "fig2_top":
      return fig2Top(dataDir);
    case "fig2_bottom":
      return fig2Bottom(dataDir);
    case "fig3":
      return fig3(dataDir);
    case "fig4":
      return fig4(dataDir);
    case "fig5":
      return fig5(dataDir);
    case "fig6":
      return fig6(dataDir);
    case "fig7":
      return fig7(dataDir);
  }
}

function familySeries(rows: Row[]): Map<string, Row[]> {
  const by = groupBy(rows, "family");
  const ordered = new Map<string, Row[]>();
  for (const fam of FAMILY_ORDER) if (by.has(fam)) ordered.set(fam, by.get(fam)!);
  for (const [fam, rs] of by) if (!ordered.has(fam)) ordered.set(fam, rs);
  return ordered;
}

function fig2Top(dataDir: string): PanelImage[] {
  const { rows } = loadTable(dataDir, "fig2_top/fig2_top.csv");
  const out: PanelImage[] = [];
  for (const k of uniqueSorted(rows, "k")) {
    const sub = rows.filter((r) => num(r, "k") === k);
    const ns = sub.map((r) => num(r, "n"));
    const vals = sub.map((r) => num(r, "c_n_k"));
    const panel = newPanel({
      title: `singleton-split diagnostic, k = ${k}`,
      xLabel: "n",
      yLabel: "c_n(k)",
      xDomain: [Math.min(...ns), Math.max(...ns)],
      yDomain: [0, Math.max(...vals) * 1.08],
      xLog: true,
    });
    const entries: { label: string; color: string }[] = [];
    let ci = 0;
    for (const [fam, rs] of familySeries(sub)) {
      const color = PALETTE[ci++ % PALETTE.length];
      rs.sort((a, b) => num(a, "n") - num(b, "n"));
      lineSeries(panel, rs.map((r) => num(r, "n")), rs.map((r) => num(r, "c_n_k")), color);
      entries.push({ label: fam, color });
    }
    legend(panel, entries, "nw");
    out.push({ id: `fig2_top_k${k}`, scene: panel.scene });
  }
  return out;
}

function fig2Bottom(dataDir: string): PanelImage[] {
  const { rows } = loadTable(dataDir, "fig2_bottom/fig2_bottom.csv");
  const out: PanelImage[] = [];
  for (const n of uniqueSorted(rows, "n")) {
    const sub = rows.filter((r) => num(r, "n") === n);
    const maxP = Math.max(...sub.map((r) => num(r, "probability")));
    const maxK = Math.max(...sub.map((r) => num(r, "k")));
    const panel = newPanel({
      title: `prior number of clusters, n = ${n}`,
      xLabel: "k",
      yLabel: "P(K_n = k)",
      xDomain: [1, Math.min(maxK, 100)],
      yDomain: [0, maxP * 1.1],
    });
    const entries: { label: string; color: string }[] = [];
    let ci = 0;
    for (const [fam, rs] of familySeries(sub)) {
      const color = PALETTE[ci++ % PALETTE.length];
      rs.sort((a, b) => num(a, "k") - num(b, "k"));
      const kept = rs.filter((r) => num(r, "k") <= 100);
      lineSeries(panel, kept.map((r) => num(r, "k")),
                 kept.map((r) => num(r, "probability")), color);
      entries.push({ label: fam, color });
    }
    legend(panel, entries);
    out.push({ id: `fig2_bottom_n${n}`, scene: panel.scene });
  }
  return out;
}

function fig3(dataDir: string): PanelImage[] {
  const { rows } = loadTable(dataDir, "fig3/fig3.csv");
  const out: PanelImage[] = [];
  for (const abar of uniqueSorted(rows, "alpha_bar")) {
    const sub = rows.filter((r) => num(r, "alpha_bar") === abar);
    const ns = uniqueSorted(sub, "n");
    const ks = uniqueSorted(sub, "k");
    const maxP = Math.max(...sub.map((r) =>
      Math.max(num(r, "prior_probability"), num(r, "posterior_probability"))));
    const panel = newCategoryPanel({
      title: `K_n prior (hollow) and posterior (solid), abar = ${abar}`,
      xLabel: "k",
      yLabel: "probability",
      yDomain: [0, maxP * 1.1],
      nCats: ks.length,
      width: 430,
    });
    const series: number[][] = [];
    const colors: string[] = [];
    const hollow: boolean[] = [];
    const entries: { label: string; color: string }[] = [];
    ns.forEach((n, ni) => {
      const byK = new Map(sub.filter((r) => num(r, "n") === n)
        .map((r) => [num(r, "k"), r]));
      const color = PALETTE[ni % PALETTE.length];
      series.push(ks.map((k) => (byK.has(k) ? num(byK.get(k)!, "prior_probability") : 0)));
      colors.push(color);
      hollow.push(true);
      series.push(ks.map((k) => (byK.has(k) ? num(byK.get(k)!, "posterior_probability") : 0)));
      colors.push(color);
      hollow.push(false);
      entries.push({ label: `n = ${n}`, color });
    });
    barGroups(panel, ks, series, colors, { hollow });
    legend(panel, entries);
    out.push({ id: `fig3_abar${tag(abar)}`, scene: panel.scene });
  }
  return out;
}

function fig4(dataDir: string): PanelImage[] {
  const { rows } = loadTable(dataDir, "fig4/fig4.csv");
  const out: PanelImage[] = [];
  for (const abar of uniqueSorted(rows, "alpha_bar")) {
    const sub = rows.filter((r) => num(r, "alpha_bar") === abar);
    const ns = uniqueSorted(sub, "n");
    const ranks = uniqueSorted(sub, "rank");
    const panel = newPanel({
      title: `sorted mixture weights, abar = ${abar}`,
      xLabel: "weight rank",
      yLabel: "weight",
      xDomain: [0.5, ranks.length + 0.5],
      yDomain: [0, 1],
      width: 430,
    });
    const entries: { label: string; color: string }[] = [];
    ns.forEach((n, ni) => {
      const color = PALETTE[ni % PALETTE.length];
      const slot = (panel.plotBox.x1 - panel.plotBox.x0) / ranks.length;
      const width = Math.min(10, (slot * 0.7) / ns.length);
      for (const r of sub.filter((q) => num(q, "n") === n)) {
        const center = panel.x.toPx(num(r, "rank"))
          + (ni - (ns.length - 1) / 2) * width * 1.2;
        const stats: BoxStats = {
          q05: num(r, "q05"), q25: num(r, "q25"), q50: num(r, "q50"),
          q75: num(r, "q75"), q95: num(r, "q95"),
        };
        boxGlyph(panel, center, width, stats, color);
      }
      entries.push({ label: `n = ${n}`, color });
    });
    legend(panel, entries);
    out.push({ id: `fig4_abar${tag(abar)}`, scene: panel.scene });
  }
  return out;
}

function fig5(dataDir: string): PanelImage[] {
  const { rows } = loadTable(dataDir, "fig5/fig5.csv");
  const out: PanelImage[] = [];
  for (const abar of uniqueSorted(rows, "alpha_bar")) {
    const all = rows.filter((r) => num(r, "alpha_bar") === abar);
    const n = Math.max(...uniqueSorted(all, "n"));
    const sub = all.filter((r) => num(r, "n") === n);
    const cs = uniqueSorted(sub, "c");
    const ks = uniqueSorted(sub, "k_tilde");
    const kCats: number[] = [];
    for (let k = Math.min(...ks); k <= Math.max(...ks); k++) kCats.push(k);
    const maxP = Math.max(...sub.map((r) => num(r, "probability")));
    const panel = newCategoryPanel({
      title: `post-processed K (n = ${n}), abar = ${abar}`,
      xLabel: "K after merge-truncate-merge",
      yLabel: "probability",
      yDomain: [0, maxP * 1.1],
      nCats: kCats.length,
      width: 430,
    });
    const series: number[][] = [];
    const colors: string[] = [];
    const entries: { label: string; color: string }[] = [];
    cs.forEach((c, ci) => {
      const byK = new Map(sub.filter((r) => num(r, "c") === c)
        .map((r) => [num(r, "k_tilde"), num(r, "probability")]));
      series.push(kCats.map((k) => byK.get(k) ?? 0));
      colors.push(PALETTE[ci % PALETTE.length]);
      entries.push({ label: `c = ${c}`, color: PALETTE[ci % PALETTE.length] });
    });
    barGroups(panel, kCats, series, colors);
    legend(panel, entries);
    out.push({ id: `fig5_abar${tag(abar)}`, scene: panel.scene });
  }
  return out;
}

function fig6(dataDir: string): PanelImage[] {
  const { rows } = loadTable(dataDir, "fig6/fig6.csv");
  loadJson(dataDir, "fig6/fig6_plateaus.json"); // presence-validated sidecar
  const out: PanelImage[] = [];
  for (const abar of uniqueSorted(rows, "alpha_bar")) {
    const sub = rows.filter((r) => num(r, "alpha_bar") === abar)
      .sort((a, b) => num(a, "c") - num(b, "c"));
    const cs = sub.map((r) => num(r, "c"));
    const means = sub.map((r) => num(r, "mean"));
    const maps = sub.map((r) => num(r, "map"));
    const top = Math.max(...means, ...maps, 3) * 1.1;
    const panel = newPanel({
      title: `regularization path, abar = ${abar}`,
      xLabel: "c",
      yLabel: "estimated number of clusters",
      xDomain: [Math.min(...cs), Math.max(...cs)],
      yDomain: [0, top],
    });
    hLine(panel, 3, "#888888", [1, 3]);           // the true K0 reference
    lineSeries(panel, cs, means, PALETTE[0], { width: 1.8 });
    lineSeries(panel, cs, maps, PALETTE[1], { dash: [6, 3, 1, 3], width: 1.5 });
    legend(panel, [
      { label: "posterior mean", color: PALETTE[0] },
      { label: "MAP", color: PALETTE[1], dash: [6, 3, 1, 3] },
      { label: "K0 = 3", color: "#888888", dash: [1, 3] },
    ]);
    out.push({ id: `fig6_abar${tag(abar)}`, scene: panel.scene });
  }
  return out;
}

function fig7(dataDir: string): PanelImage[] {
  const kn = loadTable(dataDir, "fig7/fig7_kn.csv").rows;
  const weights = loadTable(dataDir, "fig7/fig7_weights.csv").rows;
  const out: PanelImage[] = [];
  for (const mode of ["solve_ekn", "gamma_prior"]) {
    const sub = kn.filter((r) => r.mode === mode);
    if (sub.length === 0) continue;
    const ns = uniqueSorted(sub, "n");
    const ks = uniqueSorted(sub, "k");
    const maxP = Math.max(...sub.map((r) =>
      Math.max(num(r, "prior_probability"), num(r, "posterior_probability"))));
    const panel = newCategoryPanel({
      title: `K_n with varying abar (${mode.replace("_", " ")})`,
      xLabel: "k",
      yLabel: "probability",
      yDomain: [0, maxP * 1.1],
      nCats: ks.length,
      width: 430,
    });
    const series: number[][] = [];
    const colors: string[] = [];
    const hollow: boolean[] = [];
    const entries: { label: string; color: string }[] = [];
    ns.forEach((n, ni) => {
      const byK = new Map(sub.filter((r) => num(r, "n") === n).map((r) => [num(r, "k"), r]));
      const color = PALETTE[ni % PALETTE.length];
      series.push(ks.map((k) => (byK.has(k) ? num(byK.get(k)!, "prior_probability") : 0)));
      colors.push(color);
      hollow.push(true);
      series.push(ks.map((k) => (byK.has(k) ? num(byK.get(k)!, "posterior_probability") : 0)));
      colors.push(color);
      hollow.push(false);
      entries.push({ label: `n = ${n}`, color });
    });
    barGroups(panel, ks, series, colors, { hollow });
    legend(panel, entries);
    out.push({ id: `fig7_kn_${mode}`, scene: panel.scene });

    const wsub = weights.filter((r) => r.mode === mode);
    const ranks = uniqueSorted(wsub, "rank");
    const wpanel = newPanel({
      title: `sorted weights with varying abar (${mode.replace("_", " ")})`,
      xLabel: "weight rank",
      yLabel: "weight",
      xDomain: [0.5, ranks.length + 0.5],
      yDomain: [0, 1],
      width: 430,
    });
    const wentries: { label: string; color: string }[] = [];
    ns.forEach((n, ni) => {
      const color = PALETTE[ni % PALETTE.length];
      const slot = (wpanel.plotBox.x1 - wpanel.plotBox.x0) / ranks.length;
      const width = Math.min(10, (slot * 0.7) / ns.length);
      for (const r of wsub.filter((q) => num(q, "n") === n)) {
        const center = wpanel.x.toPx(num(r, "rank"))
          + (ni - (ns.length - 1) / 2) * width * 1.2;
        boxGlyph(wpanel, center, width, {
          q05: num(r, "q05"), q25: num(r, "q25"), q50: num(r, "q50"),
          q75: num(r, "q75"), q95: num(r, "q95"),
        }, color);
      }
      wentries.push({ label: `n = ${n}`, color });
    });
    legend(wpanel, wentries);
    out.push({ id: `fig7_weights_${mode}`, scene: wpanel.scene });
  }
  return out;
}
