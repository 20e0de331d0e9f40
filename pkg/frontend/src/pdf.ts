/**
 * Minimal deterministic PDF writer: one page per scene, vector
 * primitives plus Helvetica text, no compression, no metadata (so a
 * rerun on identical inputs is byte-identical).
 */

import { parseColor, Scene, Shape, Style, TextStyle, textWidth } from "./scene.js";

function n2(v: number): string {
  const r = Math.round(v * 100) / 100;
  return Object.is(r, -0) ? "0" : String(r);
}

function colorOp(c: string | undefined, op: "RG" | "rg"): string {
  const [r, g, b] = parseColor(c);
  return `${n2(r / 255)} ${n2(g / 255)} ${n2(b / 255)} ${op}`;
}

function escPdf(t: string): string {
  return t.replace(/\\/g, "\\\\").replace(/\(/g, "\\(").replace(/\)/g, "\\)");
}

function strokeSetup(st: Style, out: string[]): void {
  out.push(colorOp(st.stroke, "RG"));
  out.push(`${n2(st.strokeWidth ?? 1)} w`);
  out.push(st.dash && st.dash.length ? `[${st.dash.map(n2).join(" ")}] 0 d` : "[] 0 d");
}

function paint(st: Style): string {
  const hasFill = st.fill !== undefined && st.fill !== "none";
  const hasStroke = st.stroke !== undefined && st.stroke !== "none";
  if (hasFill && hasStroke) return "B";
  if (hasFill) return "f";
  return "S";
}

function shapeOps(sh: Shape, H: number): string[] {
  const out: string[] = [];
  const Y = (y: number) => H - y;
  switch (sh.kind) {
    case "rect": {
      if (sh.style.fill && sh.style.fill !== "none") out.push(colorOp(sh.style.fill, "rg"));
      strokeSetup(sh.style, out);
      out.push(`${n2(sh.x)} ${n2(Y(sh.y + sh.h))} ${n2(sh.w)} ${n2(sh.h)} re ${paint(sh.style)}`);
      break;
    }
    case "polyline": {
      strokeSetup(sh.style, out);
      const [x0, y0] = sh.points[0];
      out.push(`${n2(x0)} ${n2(Y(y0))} m`);
      for (let i = 1; i < sh.points.length; i++) {
        const [x, y] = sh.points[i];
        out.push(`${n2(x)} ${n2(Y(y))} l`);
      }
      out.push("S");
      break;
    }
    case "circle": {
      // four-arc Bezier approximation
      if (sh.style.fill && sh.style.fill !== "none") out.push(colorOp(sh.style.fill, "rg"));
      strokeSetup(sh.style, out);
      const k = 0.5523 * sh.r;
      const cx = sh.cx;
      const cy = Y(sh.cy);
      const r = sh.r;
      out.push(`${n2(cx + r)} ${n2(cy)} m`);
      out.push(`${n2(cx + r)} ${n2(cy + k)} ${n2(cx + k)} ${n2(cy + r)} ${n2(cx)} ${n2(cy + r)} c`);
      out.push(`${n2(cx - k)} ${n2(cy + r)} ${n2(cx - r)} ${n2(cy + k)} ${n2(cx - r)} ${n2(cy)} c`);
      out.push(`${n2(cx - r)} ${n2(cy - k)} ${n2(cx - k)} ${n2(cy - r)} ${n2(cx)} ${n2(cy - r)} c`);
      out.push(`${n2(cx + k)} ${n2(cy - r)} ${n2(cx + r)} ${n2(cy - k)} ${n2(cx + r)} ${n2(cy)} c`);
      out.push(paint(sh.style));
      break;
    }
    case "text": {
      const st = sh.style as TextStyle;
      const w = textWidth(sh.text, st.fontSize);
      let dx = 0;
      if (st.anchor === "middle") dx = -w / 2;
      else if (st.anchor === "end") dx = -w;
      let dy = 0;
      if (st.baseline === "middle") dy = st.fontSize * 0.35;
      else if (st.baseline === "hanging") dy = st.fontSize * 0.8;
      out.push(colorOp(st.color ?? "#000000", "rg"));
      out.push("BT");
      out.push(`/F1 ${n2(st.fontSize)} Tf`);
      if (st.rotate) {
        const a = (-st.rotate * Math.PI) / 180;
        const c = Math.cos(a);
        const s = Math.sin(a);
        const px = sh.x + dx * c - dy * -s;
        const py = Y(sh.y) + dx * s - dy * c;
        out.push(`${n2(c)} ${n2(s)} ${n2(-s)} ${n2(c)} ${n2(px)} ${n2(py)} Tm`);
      } else {
        out.push(`1 0 0 1 ${n2(sh.x + dx)} ${n2(Y(sh.y) - dy)} Tm`);
      }
      out.push(`(${escPdf(sh.text)}) Tj`);
      out.push("ET");
      break;
    }
  }
  return out;
}

export function toPdf(scene: Scene): Buffer {
  const H = scene.height;
  const ops: string[] = [];
  ops.push(colorOp(scene.background, "rg"));
  ops.push(`0 0 ${n2(scene.width)} ${n2(H)} re f`);
  for (const sh of scene.shapes) ops.push(...shapeOps(sh, H));
  const content = ops.join("\n") + "\n";

  const objects: string[] = [];
  objects.push("<< /Type /Catalog /Pages 2 0 R >>");
  objects.push("<< /Type /Pages /Kids [3 0 R] /Count 1 >>");
  objects.push(
    `<< /Type /Page /Parent 2 0 R /MediaBox [0 0 ${n2(scene.width)} ${n2(H)}] ` +
    `/Contents 4 0 R /Resources << /Font << /F1 5 0 R >> >> >>`);
  objects.push(`<< /Length ${Buffer.byteLength(content)} >>\nstream\n${content}endstream`);
  objects.push("<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica >>");

  let pdf = "%PDF-1.4\n";
  const offsets: number[] = [];
  objects.forEach((body, i) => {
    offsets.push(Buffer.byteLength(pdf));
    pdf += `${i + 1} 0 obj\n${body}\nendobj\n`;
  });
  const xrefPos = Buffer.byteLength(pdf);
  pdf += `xref\n0 ${objects.length + 1}\n`;
  pdf += "0000000000 65535 f \n";
  for (const off of offsets) pdf += `${String(off).padStart(10, "0")} 00000 n \n`;
  pdf += `trailer\n<< /Size ${objects.length + 1} /Root 1 0 R >>\nstartxref\n${xrefPos}\n%%EOF\n`;
  return Buffer.from(pdf, "latin1");
}
