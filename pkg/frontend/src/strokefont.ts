/**
 * Tiny plotter-style stroke font for the PNG rasterizer (the SVG and
 * PDF backends use native Helvetica instead). Glyphs live on a 4-wide
 * grid with the cap line at y=0, baseline at y=6 and descenders to
 * y=8; the advance width is 6 units. Lowercase maps to uppercase.
 */

export type Stroke = [number, number][];

const G: Record<string, Stroke[]> = {
  A: [[[0, 6], [2, 0], [4, 6]], [[1, 4], [3, 4]]],
  B: [[[0, 0], [0, 6]], [[0, 0], [3, 0], [4, 1], [4, 2], [3, 3], [0, 3]],
     [[3, 3], [4, 4], [4, 5], [3, 6], [0, 6]]],
  C: [[[4, 1], [3, 0], [1, 0], [0, 1], [0, 5], [1, 6], [3, 6], [4, 5]]],
  D: [[[0, 0], [0, 6]], [[0, 0], [3, 0], [4, 1], [4, 5], [3, 6], [0, 6]]],
  E: [[[4, 0], [0, 0], [0, 6], [4, 6]], [[0, 3], [3, 3]]],
  F: [[[4, 0], [0, 0], [0, 6]], [[0, 3], [3, 3]]],
  G: [[[4, 1], [3, 0], [1, 0], [0, 1], [0, 5], [1, 6], [3, 6], [4, 5], [4, 3], [2, 3]]],
  H: [[[0, 0], [0, 6]], [[4, 0], [4, 6]], [[0, 3], [4, 3]]],
  I: [[[1, 0], [3, 0]], [[2, 0], [2, 6]], [[1, 6], [3, 6]]],
  J: [[[3, 0], [3, 5], [2, 6], [1, 6], [0, 5]]],
  K: [[[0, 0], [0, 6]], [[4, 0], [0, 4]], [[1, 3], [4, 6]]],
  L: [[[0, 0], [0, 6], [4, 6]]],
  M: [[[0, 6], [0, 0], [2, 3], [4, 0], [4, 6]]],
  N: [[[0, 6], [0, 0], [4, 6], [4, 0]]],
  O: [[[1, 0], [3, 0], [4, 1], [4, 5], [3, 6], [1, 6], [0, 5], [0, 1], [1, 0]]],
  P: [[[0, 6], [0, 0], [3, 0], [4, 1], [4, 2], [3, 3], [0, 3]]],
  Q: [[[1, 0], [3, 0], [4, 1], [4, 5], [3, 6], [1, 6], [0, 5], [0, 1], [1, 0]],
     [[2, 4], [4, 7]]],
  R: [[[0, 6], [0, 0], [3, 0], [4, 1], [4, 2], [3, 3], [0, 3]], [[2, 3], [4, 6]]],
  S: [[[4, 1], [3, 0], [1, 0], [0, 1], [0, 2], [1, 3], [3, 3], [4, 4], [4, 5],
      [3, 6], [1, 6], [0, 5]]],
  T: [[[0, 0], [4, 0]], [[2, 0], [2, 6]]],
  U: [[[0, 0], [0, 5], [1, 6], [3, 6], [4, 5], [4, 0]]],
  V: [[[0, 0], [2, 6], [4, 0]]],
  W: [[[0, 0], [1, 6], [2, 2], [3, 6], [4, 0]]],
  X: [[[0, 0], [4, 6]], [[4, 0], [0, 6]]],
  Y: [[[0, 0], [2, 3], [4, 0]], [[2, 3], [2, 6]]],
  Z: [[[0, 0], [4, 0], [0, 6], [4, 6]]],
  "0": [[[1, 0], [3, 0], [4, 1], [4, 5], [3, 6], [1, 6], [0, 5], [0, 1], [1, 0]],
        [[3, 1], [1, 5]]],
  "1": [[[1, 1], [2, 0], [2, 6]], [[1, 6], [3, 6]]],
  "2": [[[0, 1], [1, 0], [3, 0], [4, 1], [4, 2], [0, 6], [4, 6]]],
  "3": [[[0, 1], [1, 0], [3, 0], [4, 1], [4, 2], [3, 3], [1, 3]],
        [[3, 3], [4, 4], [4, 5], [3, 6], [1, 6], [0, 5]]],
  "4": [[[3, 6], [3, 0], [0, 4], [4, 4]]],
  "5": [[[4, 0], [0, 0], [0, 3], [3, 3], [4, 4], [4, 5], [3, 6], [1, 6], [0, 5]]],
  "6": [[[4, 1], [3, 0], [1, 0], [0, 1], [0, 5], [1, 6], [3, 6], [4, 5], [4, 4],
        [3, 3], [0, 3]]],
  "7": [[[0, 0], [4, 0], [1, 6]]],
  "8": [[[1, 3], [0, 2], [0, 1], [1, 0], [3, 0], [4, 1], [4, 2], [3, 3], [1, 3],
        [0, 4], [0, 5], [1, 6], [3, 6], [4, 5], [4, 4], [3, 3]]],
  "9": [[[4, 3], [1, 3], [0, 2], [0, 1], [1, 0], [3, 0], [4, 1], [4, 5], [3, 6],
        [1, 6], [0, 5]]],
  " ": [],
  ".": [[[2, 6], [2, 6]]],
  ",": [[[2, 6], [1, 8]]],
  "-": [[[1, 3], [3, 3]]],
  "+": [[[2, 1], [2, 5]], [[0, 3], [4, 3]]],
  "=": [[[0, 2], [4, 2]], [[0, 4], [4, 4]]],
  "(": [[[3, 0], [2, 1], [2, 5], [3, 6]]],
  ")": [[[1, 0], [2, 1], [2, 5], [1, 6]]],
  "[": [[[3, 0], [2, 0], [2, 6], [3, 6]]],
  "]": [[[1, 0], [2, 0], [2, 6], [1, 6]]],
  "/": [[[0, 6], [4, 0]]],
  "%": [[[0, 6], [4, 0]], [[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]],
        [[3, 5], [4, 5], [4, 6], [3, 6], [3, 5]]],
  ":": [[[2, 2], [2, 2]], [[2, 5], [2, 5]]],
  ";": [[[2, 2], [2, 2]], [[2, 5], [1, 7]]],
  _: [[[0, 7], [4, 7]]],
  "~": [[[0, 3], [1, 2], [3, 4], [4, 3]]],
  "<": [[[3, 1], [1, 3], [3, 5]]],
  ">": [[[1, 1], [3, 3], [1, 5]]],
  "*": [[[2, 1], [2, 5]], [[0, 2], [4, 4]], [[4, 2], [0, 4]]],
  "'": [[[2, 0], [2, 1]]],
  '"': [[[1, 0], [1, 1]], [[3, 0], [3, 1]]],
  "|": [[[2, 0], [2, 6]]],
  "?": [[[0, 1], [1, 0], [3, 0], [4, 1], [4, 2], [2, 4]], [[2, 6], [2, 6]]],
};

export const GLYPH_ADVANCE = 6;
export const GLYPH_EM = 8;

export function glyphStrokes(ch: string): Stroke[] {
  const up = ch.toUpperCase();
  return G[up] ?? G["?"];
}

/** Advance width of a string at the given font size, in points. */
export function strokeTextWidth(t: string, fontSize: number): number {
  return (t.length * GLYPH_ADVANCE * fontSize) / GLYPH_EM;
}
