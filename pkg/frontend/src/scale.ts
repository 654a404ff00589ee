export type ScaleKind = "linear" | "log";

export interface Scale {
  kind: ScaleKind;
  domain: [number, number];
  range: [number, number];
  map(value: number): number;
  ticks(): number[];
}

function niceLinearTicks(lo: number, hi: number, target = 5): number[] {
  if (hi <= lo) return [lo];
  const span = hi - lo;
  const rawStep = span / target;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  let step = mag;
  for (const mult of [1, 2, 5, 10]) {
    if (mag * mult >= rawStep) {
      step = mag * mult;
      break;
    }
  }
  const ticks: number[] = [];
  let t = Math.ceil(lo / step) * step;
  for (; t <= hi + step * 1e-9; t += step) {
    ticks.push(Math.abs(t) < step * 1e-9 ? 0 : t);
  }
  return ticks;
}

function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  const first = Math.ceil(Math.log10(lo) - 1e-9);
  const last = Math.floor(Math.log10(hi) + 1e-9);
  for (let e = first; e <= last; e += 1) ticks.push(Math.pow(10, e));
  if (ticks.length === 0) ticks.push(lo, hi);
  return ticks;
}

export function makeScale(kind: ScaleKind, domain: [number, number], range: [number, number]): Scale {
  let [lo, hi] = domain;
  if (kind === "log") {
    if (lo <= 0) {
      throw new Error(`log scale needs positive domain, got [${lo}, ${hi}]`);
    }
  }
  if (lo === hi) {
    // degenerate domain: widen symmetrically so points land mid-range
    lo = kind === "log" ? lo / 2 : lo - 1;
    hi = kind === "log" ? hi * 2 : hi + 1;
  }
  const fwd = (v: number) => (kind === "log" ? Math.log10(v) : v);
  const f0 = fwd(lo);
  const f1 = fwd(hi);
  return {
    kind,
    domain: [lo, hi],
    range,
    map(value: number): number {
      const t = (fwd(value) - f0) / (f1 - f0);
      return range[0] + t * (range[1] - range[0]);
    },
    ticks(): number[] {
      return kind === "log" ? decadeTicks(lo, hi) : niceLinearTicks(lo, hi);
    },
  };
}

export function formatTick(value: number, kind: ScaleKind): string {
  if (kind === "log") {
    const e = Math.round(Math.log10(value));
    if (Math.abs(value - Math.pow(10, e)) < Math.abs(value) * 1e-9) {
      if (e >= -2 && e <= 3) return trimFloat(value);
      return `1e${e}`;
    }
  }
  return trimFloat(value);
}

function trimFloat(v: number): string {
  if (Number.isInteger(v) && Math.abs(v) < 1e7) return String(v);
  const s = v.toPrecision(3);
  return String(Number(s));
}
