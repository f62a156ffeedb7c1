/** Linear and log axis scales with tick generation. */

export interface Scale {
  /** data value -> pixel coordinate */
  toPx(v: number): number;
  ticks(): number[];
  readonly domain: [number, number];
  readonly range: [number, number];
  readonly log: boolean;
}

export function linearScale(
  domain: [number, number],
  range: [number, number]
): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  return {
    domain,
    range,
    log: false,
    toPx: (v) => r0 + ((v - d0) / span) * (r1 - r0),
    ticks: () => linearTicks(d0, d1),
  };
}

export function logScale(
  domain: [number, number],
  range: [number, number]
): Scale {
  if (domain[0] <= 0 || domain[1] <= 0) {
    throw new Error(`log scale needs a positive domain, got [${domain}]`);
  }
  const l0 = Math.log10(domain[0]);
  const l1 = Math.log10(domain[1]);
  const [r0, r1] = range;
  const span = l1 - l0 || 1;
  return {
    domain,
    range,
    log: true,
    toPx: (v) => r0 + ((Math.log10(v) - l0) / span) * (r1 - r0),
    ticks: () => {
      const out: number[] = [];
      for (let e = Math.ceil(Math.min(l0, l1)); e <= Math.max(l0, l1); e++) {
        out.push(10 ** e);
      }
      return out;
    },
  };
}

/** 4-8 "nice" tick positions covering [lo, hi]. */
export function linearTicks(lo: number, hi: number): number[] {
  if (lo === hi) return [lo];
  const raw = (hi - lo) / 5;
  const mag = 10 ** Math.floor(Math.log10(raw));
  const step = [1, 2, 2.5, 5, 10].map((m) => m * mag).find((s) => (hi - lo) / s <= 6)!;
  const out: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
    out.push(Math.abs(t) < step * 1e-9 ? 0 : t);
  }
  return out;
}

/** Compact tick label: trims float noise, switches to exponent form. */
export function tickLabel(v: number, log: boolean): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (log || a >= 1e4 || a < 1e-3) {
    const e = Math.floor(Math.log10(a));
    const m = v / 10 ** e;
    const ms = Math.abs(m - 1) < 1e-9 ? "" : `${Number(m.toFixed(2))}x`;
    return `${ms}1e${e}`;
  }
  return String(Number(v.toPrecision(6)));
}

/** Tight [min, max] over several arrays, with optional padding fraction. */
export function extent(arrays: number[][], pad = 0): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const arr of arrays) {
    for (const v of arr) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (!Number.isFinite(lo)) throw new Error("no finite data to plot");
  const span = hi - lo || Math.abs(hi) || 1;
  return [lo - pad * span, hi + pad * span];
}
