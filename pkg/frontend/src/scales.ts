/** Axis scales: data domain -> pixel range, plus tick placement. */

import { ticks } from "d3-array";

export interface Scale {
  (v: number): number;
  ticks(): { value: number; label: string }[];
  domain: [number, number];
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(0).replace("e+", "e");
  // trim float noise without padding zeros
  return String(parseFloat(v.toPrecision(6)));
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  let [d0, d1] = domain;
  if (d0 === d1) {
    d0 -= 0.5;
    d1 += 0.5;
  }
  const k = (range[1] - range[0]) / (d1 - d0);
  const s = ((v: number) => range[0] + (v - d0) * k) as Scale;
  s.domain = [d0, d1];
  s.ticks = () => ticks(d0, d1, 5).map((value) => ({ value, label: fmt(value) }));
  return s;
}

/** Log10 scale; domain must be positive. Ticks at decades. */
export function logScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  if (d0 <= 0 || d1 <= 0) throw new Error(`log scale needs a positive domain, got [${d0}, ${d1}]`);
  const l0 = Math.log10(d0);
  const l1 = Math.log10(d1) === l0 ? l0 + 1 : Math.log10(d1);
  const k = (range[1] - range[0]) / (l1 - l0);
  const s = ((v: number) => range[0] + (Math.log10(v) - l0) * k) as Scale;
  s.domain = [d0, d1];
  s.ticks = () => {
    const out: { value: number; label: string }[] = [];
    for (let e = Math.ceil(l0); e <= Math.floor(l1); e++) {
      out.push({ value: 10 ** e, label: `1e${e}` });
    }
    if (out.length === 0) out.push({ value: d0, label: fmt(d0) }, { value: d1, label: fmt(d1) });
    return out;
  };
  return s;
}

/** Min/max of finite values with a little multiplicative/additive headroom. */
export function padded(values: number[], frac = 0.06): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (!Number.isFinite(v)) continue;
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo)) throw new Error("no finite values to scale");
  const span = hi - lo || Math.abs(hi) || 1;
  return [lo - frac * span, hi + frac * span];
}
