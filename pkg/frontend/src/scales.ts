/** Linear and log axis scales with tick selection. */

export interface Scale {
  toPx(v: number): number;
  ticks(count?: number): number[];
  readonly domain: [number, number];
  readonly range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  return {
    domain,
    range,
    toPx: (v) => r0 + ((v - d0) / span) * (r1 - r0),
    ticks: (count = 5) => linearTicks(d0, d1, count),
  };
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  if (d0 <= 0 || d1 <= 0) throw new Error("log scale requires a positive domain");
  const [r0, r1] = range;
  const l0 = Math.log10(d0);
  const span = Math.log10(d1) - l0 || 1;
  return {
    domain,
    range,
    toPx: (v) => r0 + ((Math.log10(v) - l0) / span) * (r1 - r0),
    ticks: () => logTicks(d0, d1),
  };
}

export function linearTicks(lo: number, hi: number, count: number): number[] {
  if (!(hi > lo)) return [lo];
  const rawStep = (hi - lo) / Math.max(1, count);
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  let step = mag;
  for (const m of [1, 2, 2.5, 5, 10]) {
    if (mag * m >= rawStep) {
      step = mag * m;
      break;
    }
  }
  const start = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = start; v <= hi + step * 1e-9; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : Number(v.toPrecision(12)));
  }
  return out;
}

export function logTicks(lo: number, hi: number): number[] {
  const out: number[] = [];
  const e0 = Math.floor(Math.log10(lo));
  const e1 = Math.ceil(Math.log10(hi));
  for (let e = e0; e <= e1; e++) {
    const v = Math.pow(10, e);
    if (v >= lo * (1 - 1e-12) && v <= hi * (1 + 1e-12)) out.push(v);
  }
  if (out.length < 2) {
    return linearTicks(lo, hi, 4);
  }
  return out;
}

/** Compact tick label: trims float noise, switches to exponent form when needed. */
export function tickLabel(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 10000 || a < 0.001) {
    const e = Math.floor(Math.log10(a));
    const m = v / Math.pow(10, e);
    const mm = Number(m.toPrecision(3));
    return mm === 1 ? `1e${e}` : `${mm}e${e}`;
  }
  return String(Number(v.toPrecision(6)));
}
