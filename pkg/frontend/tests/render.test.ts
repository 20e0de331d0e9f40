import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import * as zlib from "node:zlib";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { buildFigure } from "../src/figures.js";
import { renderFigures } from "../src/cli.js";
import { toPdf } from "../src/pdf.js";
import { toPng } from "../src/png.js";
import { toSvg } from "../src/svg.js";

const HERE = path.dirname(fileURLToPath(import.meta.url));
const FIXTURES = path.join(HERE, "fixtures");

function tmpdir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), "bnpclust-render-"));
}

describe("panel layouts", () => {
  it("fig2 produces 3 + 3 panels", () => {
    expect(buildFigure("fig2_top", FIXTURES).length).toBe(3);
    expect(buildFigure("fig2_bottom", FIXTURES).length).toBe(3);
  });

  it("fig6 produces 4 panels (one per alpha_bar)", () => {
    const panels = buildFigure("fig6", FIXTURES);
    expect(panels.length).toBe(4);
    expect(panels.map((p) => p.id)).toContain("fig6_abar0p01");
  });

  it("fig3/fig4/fig5 produce one panel per alpha_bar", () => {
    for (const id of ["fig3", "fig4", "fig5"] as const) {
      expect(buildFigure(id, FIXTURES).length).toBe(4);
    }
  });

  it("fig7 produces 4 panels (two modes x pmf/weights)", () => {
    expect(buildFigure("fig7", FIXTURES).length).toBe(4);
  });
});

describe("validation failures", () => {
  it("reports a missing input file with its path", () => {
    expect(() => buildFigure("fig6", tmpdir())).toThrowError(/missing input file/);
  });

  it("rejects a header that disagrees with the schema sidecar", () => {
    const dir = tmpdir();
    const sub = path.join(dir, "fig6");
    fs.mkdirSync(sub, { recursive: true });
    const src = path.join(FIXTURES, "fig6");
    const csv = fs.readFileSync(path.join(src, "fig6.csv"), "utf8")
      .replace("alpha_bar,n,c,mean,map", "alpha_bar,n,c,avg,map");
    fs.writeFileSync(path.join(sub, "fig6.csv"), csv);
    fs.copyFileSync(path.join(src, "fig6.csv.schema.json"),
                    path.join(sub, "fig6.csv.schema.json"));
    fs.copyFileSync(path.join(src, "fig6_plateaus.json"),
                    path.join(sub, "fig6_plateaus.json"));
    expect(() => buildFigure("fig6", dir)).toThrowError(/does not match schema/);
  });

  it("rejects an empty data table", () => {
    const dir = tmpdir();
    const sub = path.join(dir, "fig6");
    fs.mkdirSync(sub, { recursive: true });
    fs.writeFileSync(path.join(sub, "fig6.csv"), "alpha_bar,n,c,mean,map\n");
    fs.writeFileSync(path.join(sub, "fig6.csv.schema.json"), JSON.stringify({
      version: 1, file: "fig6.csv", columns: ["alpha_bar", "n", "c", "mean", "map"], rows: 0,
    }));
    fs.writeFileSync(path.join(sub, "fig6_plateaus.json"), "{}");
    expect(() => buildFigure("fig6", dir)).toThrowError(/no data rows/);
  });
});

describe("encoders", () => {
  const scene = buildFigure("fig6", FIXTURES)[0].scene;

  it("svg output is well-formed and stable", () => {
    const a = toSvg(scene);
    const b = toSvg(scene);
    expect(a).toBe(b);
    expect(a.startsWith("<svg xmlns")).toBe(true);
    expect(a.trimEnd().endsWith("</svg>")).toBe(true);
    expect(a).toContain("regularization path");
  });

  it("pdf output has a valid skeleton and no volatile metadata", () => {
    const buf = toPdf(scene);
    const s = buf.toString("latin1");
    expect(s.startsWith("%PDF-1.4")).toBe(true);
    expect(s).toContain("/Type /Page");
    expect(s).toContain("startxref");
    expect(s).not.toContain("CreationDate");
    expect(toPdf(scene).equals(buf)).toBe(true);
  });

  it("png output decodes to the scene dimensions", () => {
    const buf = toPng(scene);
    expect(buf.subarray(0, 8).toString("latin1")).toBe("\x89PNG\r\n\x1a\n");
    const width = buf.readUInt32BE(16);
    const height = buf.readUInt32BE(20);
    expect(width).toBe(Math.round(scene.width));
    expect(height).toBe(Math.round(scene.height));
    // IDAT payload inflates to height * (3 width + 1) filter-prefixed rows
    const idatStart = buf.indexOf("IDAT") + 4;
    const idatLen = buf.readUInt32BE(buf.indexOf("IDAT") - 4);
    const raw = zlib.inflateSync(buf.subarray(idatStart, idatStart + idatLen));
    expect(raw.length).toBe(height * (3 * width + 1));
  });
});

describe("end-to-end rendering", () => {
  it("renders every figure and the outputs are byte-stable across reruns", () => {
    const out1 = tmpdir();
    const out2 = tmpdir();
    for (const format of ["svg", "png", "pdf"] as const) {
      const res1 = renderFigures("all", FIXTURES, out1, format);
      const res2 = renderFigures("all", FIXTURES, out2, format);
      const total = res1.reduce((acc, r) => acc + r.files.length, 0);
      expect(total).toBe(3 + 3 + 4 + 4 + 4 + 4 + 4);
      for (let i = 0; i < res1.length; i++) {
        for (let j = 0; j < res1[i].files.length; j++) {
          const a = fs.readFileSync(res1[i].files[j]);
          const b = fs.readFileSync(res2[i].files[j]);
          expect(a.equals(b)).toBe(true);
        }
      }
    }
  });

  it("rejects unknown figure ids", () => {
    expect(() => renderFigures("fig99", FIXTURES, tmpdir(), "svg"))
      .toThrowError(/unknown figure id/);
  });
});
