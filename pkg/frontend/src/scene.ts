/**
 * Resolution-independent scene graph shared by the SVG, PDF and PNG
 * backends. Coordinates are in points with the origin at the top-left.
 */

export interface Style {
  stroke?: string;       // css-style hex "#rrggbb" or "none"
  strokeWidth?: number;
  fill?: string;
  dash?: number[];       // on/off lengths in points
  opacity?: number;
}

export interface TextStyle {
  fontSize: number;
  color?: string;
  anchor?: "start" | "middle" | "end";
  baseline?: "alphabetic" | "middle" | "hanging";
  rotate?: number;       // degrees, about the anchor point
}

export type Shape =
  | { kind: "rect"; x: number; y: number; w: number; h: number; style: Style }
  | { kind: "polyline"; points: [number, number][]; style: Style }
  | { kind: "circle"; cx: number; cy: number; r: number; style: Style }
  | { kind: "text"; x: number; y: number; text: string; style: TextStyle };

export interface Scene {
  width: number;
  height: number;
  background: string;
  shapes: Shape[];
}

export function newScene(width: number, height: number): Scene {
  return { width, height, background: "#ffffff", shapes: [] };
}

export function line(s: Scene, x1: number, y1: number, x2: number, y2: number, style: Style): void {
  s.shapes.push({ kind: "polyline", points: [[x1, y1], [x2, y2]], style });
}

export function polyline(s: Scene, points: [number, number][], style: Style): void {
  if (points.length >= 2) s.shapes.push({ kind: "polyline", points, style });
}

export function rect(s: Scene, x: number, y: number, w: number, h: number, style: Style): void {
  s.shapes.push({ kind: "rect", x, y, w, h, style });
}

export function circle(s: Scene, cx: number, cy: number, r: number, style: Style): void {
  s.shapes.push({ kind: "circle", cx, cy, r, style });
}

export function text(s: Scene, x: number, y: number, t: string, style: TextStyle): void {
  if (t.length) s.shapes.push({ kind: "text", x, y, text: t, style });
}

/** Parse "#rrggbb" into [r, g, b] bytes; unknown strings map to black. */
export function parseColor(c: string | undefined): [number, number, number] {
  if (!c || c === "none") return [0, 0, 0];
  const m = /^#([0-9a-fA-F]{6})$/.exec(c);
  if (!m) return [0, 0, 0];
  const v = parseInt(m[1], 16);
  return [(v >> 16) & 0xff, (v >> 8) & 0xff, v & 0xff];
}

/** Approximate advance width of Helvetica-ish text, in points. */
export function textWidth(t: string, fontSize: number): number {
  return t.length * fontSize * 0.6;
}
