export interface Scale {
  map(value: number): number;
  ticks(): number[];
}

/** Round the raw step down to the nearest 1/2/5 decade multiple. */
function niceStep(span: number, target: number): number {
  const raw = span / target;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const m of [5, 2, 1]) {
    if (raw >= m * mag) return m * mag;
  }
  return mag;
}

export function linearScale(
  domain: [number, number],
  range: [number, number],
  tickTarget = 5
): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  return {
    map: (v) => r0 + ((v - d0) / span) * (r1 - r0),
    ticks: () => {
      const step = niceStep(span, tickTarget);
      const out: number[] = [];
      for (let t = Math.ceil(d0 / step) * step; t <= d1 + step * 1e-9; t += step) {
        out.push(Math.abs(t) < step * 1e-9 ? 0 : t);
      }
      return out;
    },
  };
}

/** Log scale with decade ticks; the domain must be positive. */
export function logScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  if (d0 <= 0 || d1 <= 0) {
    throw new RangeError(`log scale needs a positive domain, got [${d0}, ${d1}]`);
  }
  const [r0, r1] = range;
  const l0 = Math.log10(d0);
  const span = Math.log10(d1) - l0 || 1;
  return {
    map: (v) => r0 + ((Math.log10(v) - l0) / span) * (r1 - r0),
    ticks: () => {
      // stride over decades so wide domains stay readable
      const step = Math.max(1, Math.ceil(span / 8));
      const out: number[] = [];
      for (let e = Math.ceil(l0); e <= Math.log10(d1) + 1e-9; e += step) {
        out.push(Math.pow(10, e));
      }
      return out;
    },
  };
}

export function formatTick(value: number): string {
  if (value === 0) return "0";
  const abs = Math.abs(value);
  if (abs >= 1e4 || abs < 1e-3) {
    const exp = Math.floor(Math.log10(abs));
    const mant = value / Math.pow(10, exp);
    const m = Math.abs(mant - 1) < 1e-9 ? "" : `${Number(mant.toFixed(2))}×`;
    return `${m}10^${exp}`;
  }
  return `${Number(value.toPrecision(6))}`;
}
