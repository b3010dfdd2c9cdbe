/** Viridis lookup: 32 evenly spaced anchors, linearly interpolated. A value
 * is first normalized against the clip bounds, so darker (low) difference
 * scores map to the dark end of the ramp. */

export type Rgb = [number, number, number];

export const VIRIDIS_ANCHORS: Rgb[] = [
  [68, 1, 84],
  [71, 13, 96],
  [72, 24, 106],
  [72, 35, 116],
  [71, 46, 124],
  [69, 56, 130],
  [66, 65, 134],
  [62, 74, 137],
  [58, 84, 140],
  [54, 93, 141],
  [50, 101, 142],
  [46, 109, 142],
  [43, 117, 142],
  [40, 125, 142],
  [37, 132, 142],
  [34, 140, 141],
  [31, 148, 140],
  [30, 156, 137],
  [32, 163, 134],
  [37, 171, 130],
  [46, 179, 124],
  [58, 186, 118],
  [72, 193, 110],
  [88, 199, 101],
  [108, 205, 90],
  [127, 211, 78],
  [147, 215, 65],
  [168, 219, 52],
  [192, 223, 37],
  [213, 226, 26],
  [234, 229, 26],
  [253, 231, 37],
];

export function viridis(t: number): Rgb {
  const clamped = Math.min(1, Math.max(0, t));
  const pos = clamped * (VIRIDIS_ANCHORS.length - 1);
  const lo = Math.floor(pos);
  const hi = Math.min(lo + 1, VIRIDIS_ANCHORS.length - 1);
  const frac = pos - lo;
  const a = VIRIDIS_ANCHORS[lo];
  const b = VIRIDIS_ANCHORS[hi];
  return [
    Math.round(a[0] + (b[0] - a[0]) * frac),
    Math.round(a[1] + (b[1] - a[1]) * frac),
    Math.round(a[2] + (b[2] - a[2]) * frac),
  ];
}

/** p-th percentile (0..100) by linear interpolation over the sorted values. */
export function percentile(values: number[], p: number): number {
  if (values.length === 0) throw new Error("percentile of empty array");
  const sorted = [...values].sort((a, b) => a - b);
  const pos = (Math.min(100, Math.max(0, p)) / 100) * (sorted.length - 1);
  const lo = Math.floor(pos);
  const hi = Math.ceil(pos);
  const frac = pos - lo;
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

/** Clip bounds for display: percentiles tame the outliers that otherwise
 * dominate difference-matrix rendering. */
export function clipBounds(values: number[], pLow: number, pHigh: number): [number, number] {
  return [percentile(values, pLow), percentile(values, pHigh)];
}

export function normalize(value: number, lo: number, hi: number): number {
  if (hi === lo) return 0.5; // constant payload renders as a uniform mid tone
  return Math.min(1, Math.max(0, (value - lo) / (hi - lo)));
}
