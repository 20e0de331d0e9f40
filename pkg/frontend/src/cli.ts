/**
 * render <figure-id> --data <dir> --out <path> --format pdf|png|svg
 *
 * Writes one image per panel plus a small JSON manifest; any missing or
 * schema-invalid input aborts with a descriptive message and a nonzero
 * exit code, leaving no partial panel set behind.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { DataError } from "./csv.js";
import { buildFigure, FIGURE_IDS, FigureId, PanelImage } from "./figures.js";
import { toPdf } from "./pdf.js";
import { toPng } from "./png.js";
import { toSvg } from "./svg.js";

interface Args {
  figure: string;
  data: string;
  out: string;
  format: "pdf" | "png" | "svg";
}

function parseArgs(argv: string[]): Args {
  const positional: string[] = [];
  const flags: Record<string, string> = {};
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    if (a === "render") continue;
    if (a.startsWith("--")) {
      const key = a.slice(2);
      flags[key] = argv[++i];
    } else {
      positional.push(a);
    }
  }
  if (positional.length !== 1) {
    throw new Error(
      `usage: render <figure-id|all> --data <dir> --out <dir> [--format pdf|png|svg]\n` +
      `figure ids: ${FIGURE_IDS.join(", ")}`);
  }
  const format = (flags.format ?? "pdf") as Args["format"];
  if (!["pdf", "png", "svg"].includes(format)) {
    throw new Error(`unsupported format '${flags.format}'; choose pdf, png or svg`);
  }
  if (!flags.data) throw new Error("--data <dir> is required");
  if (!flags.out) throw new Error("--out <dir> is required");
  return { figure: positional[0], data: flags.data, out: flags.out, format };
}

function encode(panel: PanelImage, format: Args["format"]): Buffer {
  if (format === "pdf") return toPdf(panel.scene);
  if (format === "png") return toPng(panel.scene);
  return Buffer.from(toSvg(panel.scene), "utf8");
}

export function renderFigures(figure: string, dataDir: string, outDir: string,
                              format: Args["format"]): { figure: string; files: string[] }[] {
  const ids: FigureId[] = figure === "all"
    ? [...FIGURE_IDS]
    : [validateFigureId(figure)];
  const results: { figure: string; files: string[] }[] = [];
  for (const id of ids) {
    const panels = buildFigure(id, dataDir);   // validate & build before any write
    fs.mkdirSync(outDir, { recursive: true });
    const files: string[] = [];
    for (const p of panels) {
      const file = path.join(outDir, `${p.id}.${format}`);
      fs.writeFileSync(file, encode(p, format));
      files.push(file);
    }
    results.push({ figure: id, files });
  }
  return results;
}

function validateFigureId(figure: string): FigureId {
  if ((FIGURE_IDS as readonly string[]).includes(figure)) return figure as FigureId;
  throw new Error(`unknown figure id '${figure}'; choose from ${FIGURE_IDS.join(", ")} or 'all'`);
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (e) {
    console.error((e as Error).message);
    return 2;
  }
  try {
    const results = renderFigures(args.figure, args.data, args.out, args.format);
    console.log(JSON.stringify({
      format: args.format,
      figures: results.map((r) => ({ figure: r.figure, panels: r.files.length, files: r.files })),
    }, null, 2));
    return 0;
  } catch (e) {
    if (e instanceof DataError) {
      console.error(`input validation failed: ${e.message}`);
    } else {
      console.error((e as Error).message);
    }
    return 1;
  }
}

const invokedDirectly = process.argv[1] &&
  (process.argv[1].endsWith("cli.js") || process.argv[1].endsWith("bnpclust-render"));
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
