/**
 * Software rasterizer and PNG encoder (no native dependencies).
 *
 * The scene is stamped onto a 2x supersampled RGB raster and
 * box-downsampled, which buys cheap antialiasing; text is drawn with
 * the built-in stroke font. The encoder writes 8-bit RGB with a fixed
 * zlib setting, so identical scenes yield byte-identical files.
 */

import * as zlib from "node:zlib";

import { parseColor, Scene, Shape, TextStyle } from "./scene.js";
import { GLYPH_ADVANCE, GLYPH_EM, glyphStrokes, strokeTextWidth } from "./strokefont.js";

const SS = 2; // supersampling factor

class Raster {
  readonly w: number;
  readonly h: number;
  readonly data: Uint8ClampedArray;

  constructor(w: number, h: number, bg: [number, number, number]) {
    this.w = w;
    this.h = h;
    this.data = new Uint8ClampedArray(w * h * 3);
    for (let i = 0; i < w * h; i++) {
      this.data[3 * i] = bg[0];
      this.data[3 * i + 1] = bg[1];
      this.data[3 * i + 2] = bg[2];
    }
  }

  set(x: number, y: number, c: [number, number, number]): void {
    if (x < 0 || y < 0 || x >= this.w || y >= this.h) return;
    const i = 3 * (y * this.w + x);
    this.data[i] = c[0];
    this.data[i + 1] = c[1];
    this.data[i + 2] = c[2];
  }

  disc(cx: number, cy: number, r: number, c: [number, number, number]): void {
    const r2 = r * r;
    const x0 = Math.floor(cx - r);
    const x1 = Math.ceil(cx + r);
    const y0 = Math.floor(cy - r);
    const y1 = Math.ceil(cy + r);
    for (let y = y0; y <= y1; y++) {
      for (let x = x0; x <= x1; x++) {
        const dx = x + 0.5 - cx;
        const dy = y + 0.5 - cy;
        if (dx * dx + dy * dy <= r2) this.set(x, y, c);
      }
    }
  }

  segment(x1: number, y1: number, x2: number, y2: number, width: number,
          c: [number, number, number], dash?: number[], phase = 0): number {
    const len = Math.hypot(x2 - x1, y2 - y1);
    const r = Math.max(width / 2, 0.6);
    const step = 0.35;
    if (len === 0) {
      this.disc(x1, y1, r, c);
      return phase;
    }
    const total = dash && dash.length ? dash.reduce((a, b) => a + b, 0) : 0;
    for (let t = 0; t <= len; t += step) {
      if (total > 0) {
        let pos = (phase + t) % total;
        let on = true;
        for (const d of dash!) {
          if (pos < d) break;
          pos -= d;
          on = !on;
        }
        if (!on) continue;
      }
      const u = t / len;
      this.disc(x1 + u * (x2 - x1), y1 + u * (y2 - y1), r, c);
    }
    return phase + len;
  }

  fillRect(x: number, y: number, w: number, h: number, c: [number, number, number]): void {
    const x0 = Math.round(x);
    const y0 = Math.round(y);
    const x1 = Math.round(x + w);
    const y1 = Math.round(y + h);
    for (let yy = y0; yy < y1; yy++) {
      for (let xx = x0; xx < x1; xx++) this.set(xx, yy, c);
    }
  }
}

function drawText(r: Raster, sh: Extract<Shape, { kind: "text" }>): void {
  const st = sh.style as TextStyle;
  const unit = (st.fontSize * SS) / GLYPH_EM;
  const color = parseColor(st.color ?? "#000000");
  const width = strokeTextWidth(sh.text, st.fontSize) * SS;
  let ox = sh.x * SS;
  let oy = sh.y * SS;
  if (st.anchor === "middle") ox -= width / 2;
  else if (st.anchor === "end") ox -= width;
  if (st.baseline === "middle") oy += 3 * unit;
  else if (st.baseline === "hanging") oy += 6 * unit;
  const rot = ((st.rotate ?? 0) * Math.PI) / 180;
  const cos = Math.cos(rot);
  const sin = Math.sin(rot);
  const ax = sh.x * SS;
  const ay = sh.y * SS;
  const lw = Math.max(1.0, unit * 0.9);
  for (let i = 0; i < sh.text.length; i++) {
    const strokes = glyphStrokes(sh.text[i]);
    const gx = ox + i * GLYPH_ADVANCE * unit;
    for (const stroke of strokes) {
      for (let j = 1; j < Math.max(stroke.length, 2); j++) {
        const a = stroke[Math.max(0, j - 1)];
        const b = stroke[Math.min(j, stroke.length - 1)];
        let x1 = gx + a[0] * unit;
        let y1 = oy + (a[1] - 6) * unit;
        let x2 = gx + b[0] * unit;
        let y2 = oy + (b[1] - 6) * unit;
        if (rot) {
          [x1, y1] = rotate(x1, y1, ax, ay, cos, sin);
          [x2, y2] = rotate(x2, y2, ax, ay, cos, sin);
        }
        r.segment(x1, y1, x2, y2, lw, color);
      }
    }
  }
}

function rotate(x: number, y: number, ax: number, ay: number,
                cos: number, sin: number): [number, number] {
  const dx = x - ax;
  const dy = y - ay;
  return [ax + dx * cos - dy * sin, ay + dx * sin + dy * cos];
}

export function rasterize(scene: Scene): { width: number; height: number; rgb: Uint8ClampedArray } {
  const W = Math.round(scene.width * SS);
  const H = Math.round(scene.height * SS);
  const r = new Raster(W, H, parseColor(scene.background === "none" ? "#ffffff" : scene.background));
  for (const sh of scene.shapes) {
    switch (sh.kind) {
      case "rect": {
        if (sh.style.fill && sh.style.fill !== "none") {
          r.fillRect(sh.x * SS, sh.y * SS, sh.w * SS, sh.h * SS, parseColor(sh.style.fill));
        }
        if (sh.style.stroke && sh.style.stroke !== "none") {
          const c = parseColor(sh.style.stroke);
          const w = (sh.style.strokeWidth ?? 1) * SS;
          const pts: [number, number][] = [
            [sh.x, sh.y], [sh.x + sh.w, sh.y], [sh.x + sh.w, sh.y + sh.h],
            [sh.x, sh.y + sh.h], [sh.x, sh.y]];
          for (let i = 1; i < pts.length; i++) {
            r.segment(pts[i - 1][0] * SS, pts[i - 1][1] * SS,
                      pts[i][0] * SS, pts[i][1] * SS, w, c);
          }
        }
        break;
      }
      case "polyline": {
        const c = parseColor(sh.style.stroke ?? "#000000");
        const w = (sh.style.strokeWidth ?? 1) * SS;
        const dash = sh.style.dash?.map((d) => d * SS);
        let phase = 0;
        for (let i = 1; i < sh.points.length; i++) {
          phase = r.segment(sh.points[i - 1][0] * SS, sh.points[i - 1][1] * SS,
                            sh.points[i][0] * SS, sh.points[i][1] * SS, w, c, dash, phase);
        }
        break;
      }
      case "circle": {
        if (sh.style.fill && sh.style.fill !== "none") {
          r.disc(sh.cx * SS, sh.cy * SS, sh.r * SS, parseColor(sh.style.fill));
        }
        if (sh.style.stroke && sh.style.stroke !== "none") {
          const c = parseColor(sh.style.stroke);
          const w = (sh.style.strokeWidth ?? 1) * SS;
          const steps = Math.max(16, Math.ceil(2 * Math.PI * sh.r * SS / 0.35));
          for (let i = 1; i <= steps; i++) {
            const a0 = (2 * Math.PI * (i - 1)) / steps;
            const a1 = (2 * Math.PI * i) / steps;
            r.segment(sh.cx * SS + sh.r * SS * Math.cos(a0), sh.cy * SS + sh.r * SS * Math.sin(a0),
                      sh.cx * SS + sh.r * SS * Math.cos(a1), sh.cy * SS + sh.r * SS * Math.sin(a1),
                      w, c);
          }
        }
        break;
      }
      case "text":
        drawText(r, sh);
        break;
    }
  }
  // box downsample SS x SS
  const w = Math.round(scene.width);
  const h = Math.round(scene.height);
  const out = new Uint8ClampedArray(w * h * 3);
  for (let y = 0; y < h; y++) {
    for (let x = 0; x < w; x++) {
      for (let ch = 0; ch < 3; ch++) {
        let acc = 0;
        for (let sy = 0; sy < SS; sy++) {
          for (let sx = 0; sx < SS; sx++) {
            acc += r.data[3 * ((y * SS + sy) * W + (x * SS + sx)) + ch];
          }
        }
        out[3 * (y * w + x) + ch] = acc / (SS * SS);
      }
    }
  }
  return { width: w, height: h, rgb: out };
}

// -- PNG encoding -----------------------------------------------------------

const CRC_TABLE = (() => {
  const t = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    t[n] = c >>> 0;
  }
  return t;
})();

function crc32(buf: Buffer): number {
  let c = 0xffffffff;
  for (let i = 0; i < buf.length; i++) c = CRC_TABLE[(c ^ buf[i]) & 0xff] ^ (c >>> 8);
  return (c ^ 0xffffffff) >>> 0;
}

function chunk(type: string, data: Buffer): Buffer {
  const len = Buffer.alloc(4);
  len.writeUInt32BE(data.length);
  const body = Buffer.concat([Buffer.from(type, "latin1"), data]);
  const crc = Buffer.alloc(4);
  crc.writeUInt32BE(crc32(body));
  return Buffer.concat([len, body, crc]);
}

export function toPng(scene: Scene): Buffer {
  const { width, height, rgb } = rasterize(scene);
  const stride = width * 3;
  const raw = Buffer.alloc((stride + 1) * height);
  for (let y = 0; y < height; y++) {
    raw[y * (stride + 1)] = 0; // filter type: none
    Buffer.from(rgb.buffer, y * stride, stride).copy(raw, y * (stride + 1) + 1);
  }
  const ihdr = Buffer.alloc(13);
  ihdr.writeUInt32BE(width, 0);
  ihdr.writeUInt32BE(height, 4);
  ihdr[8] = 8;  // bit depth
  ihdr[9] = 2;  // color type: RGB
  const idat = zlib.deflateSync(raw, { level: 9, memLevel: 9, strategy: 0 });
  return Buffer.concat([
    Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]),
    chunk("IHDR", ihdr),
    chunk("IDAT", idat),
    chunk("IEND", Buffer.alloc(0)),
  ]);
}
