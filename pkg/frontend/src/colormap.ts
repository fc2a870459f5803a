/**
 * Fixed perceptual colormap (viridis anchor points, linearly interpolated)
 * and the default per-slice scaling: 1st to 99th percentile of the finite
 * values.  Both are frozen so identical inputs give identical pixels.
 */

const ANCHORS: [number, number, number][] = [
  [68, 1, 84],
  [72, 40, 120],
  [62, 74, 137],
  [49, 104, 142],
  [38, 130, 142],
  [31, 158, 137],
  [53, 183, 121],
  [109, 205, 89],
  [180, 222, 44],
  [253, 231, 37],
];

export function colorAt(unit: number): [number, number, number] {
  const u = Math.min(1, Math.max(0, unit));
  const pos = u * (ANCHORS.length - 1);
  const lo = Math.floor(pos);
  const hi = Math.min(lo + 1, ANCHORS.length - 1);
  const frac = pos - lo;
  return [0, 1, 2].map((c) =>
    Math.round(ANCHORS[lo][c] * (1 - frac) + ANCHORS[hi][c] * frac),
  ) as [number, number, number];
}

export const MISSING_COLOR: [number, number, number] = [220, 220, 220];

export function percentile(sortedValues: number[], q: number): number {
  if (sortedValues.length === 0) return NaN;
  const pos = (sortedValues.length - 1) * q;
  const lo = Math.floor(pos);
  const hi = Math.ceil(pos);
  const frac = pos - lo;
  return sortedValues[lo] * (1 - frac) + sortedValues[hi] * frac;
}

/** Default color limits: [1st, 99th] percentile of the finite values. */
export function defaultScale(values: number[]): [number, number] {
  const finite = values.filter((v) => Number.isFinite(v)).sort((a, b) => a - b);
  if (finite.length === 0) return [0, 1];
  let lo = percentile(finite, 0.01);
  let hi = percentile(finite, 0.99);
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  return [lo, hi];
}
