/** Deterministic SVG serialization of a scene (no timestamps, fixed order). */

import { Scene, Shape, Style, TextStyle } from "./scene.js";

function num(v: number): string {
  const r = Math.round(v * 100) / 100;
  return Object.is(r, -0) ? "0" : String(r);
}

function esc(t: string): string {
  return t.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function strokeAttrs(st: Style): string {
  const parts: string[] = [];
  parts.push(`fill="${st.fill ?? "none"}"`);
  parts.push(`stroke="${st.stroke ?? "none"}"`);
  if (st.stroke && st.stroke !== "none") {
    parts.push(`stroke-width="${num(st.strokeWidth ?? 1)}"`);
    if (st.dash && st.dash.length) parts.push(`stroke-dasharray="${st.dash.map(num).join(" ")}"`);
  }
  if (st.opacity !== undefined && st.opacity < 1) parts.push(`opacity="${num(st.opacity)}"`);
  return parts.join(" ");
}

function shapeSvg(sh: Shape): string {
  switch (sh.kind) {
    case "rect":
      return `<rect x="${num(sh.x)}" y="${num(sh.y)}" width="${num(sh.w)}" height="${num(sh.h)}" ${strokeAttrs(sh.style)}/>`;
    case "polyline": {
      const pts = sh.points.map(([x, y]) => `${num(x)},${num(y)}`).join(" ");
      return `<polyline points="${pts}" ${strokeAttrs(sh.style)}/>`;
    }
    case "circle":
      return `<circle cx="${num(sh.cx)}" cy="${num(sh.cy)}" r="${num(sh.r)}" ${strokeAttrs(sh.style)}/>`;
    case "text": {
      const st = sh.style as TextStyle;
      const anchor = st.anchor ?? "start";
      const baseline = st.baseline === "middle" ? "central" :
        st.baseline === "hanging" ? "hanging" : "alphabetic";
      const rot = st.rotate ? ` transform="rotate(${num(st.rotate)} ${num(sh.x)} ${num(sh.y)})"` : "";
      return `<text x="${num(sh.x)}" y="${num(sh.y)}" font-family="Helvetica,Arial,sans-serif" ` +
        `font-size="${num(st.fontSize)}" fill="${st.color ?? "#000000"}" ` +
        `text-anchor="${anchor}" dominant-baseline="${baseline}"${rot}>${esc(sh.text)}</text>`;
    }
  }
}

export function toSvg(scene: Scene): string {
  const head =
    `<svg xmlns="http://www.w3.org/2000/svg" width="${num(scene.width)}" ` +
    `height="${num(scene.height)}" viewBox="0 0 ${num(scene.width)} ${num(scene.height)}">\n` +
    `<rect x="0" y="0" width="${num(scene.width)}" height="${num(scene.height)}" fill="${scene.background}"/>\n`;
  const body = scene.shapes.map(shapeSvg).join("\n");
  return head + body + "\n</svg>\n";
}
