import { describe, expect, it } from "vitest";

import { VIRIDIS_ANCHORS, clipBounds, normalize, percentile, viridis } from "../src/colormap";
import { isHeatmapError, renderHeatmap, type HeatmapImage } from "../src/heatmap";
import type { MatchEntry, MatrixPayload } from "../src/types";

function payload(n: number, m: number, values: number[], extra: Partial<MatrixPayload> = {}): MatrixPayload {
  return { kind: "raw", n, m, source_n: n, source_m: m, downsample: 1, values, ...extra };
}

// independent table lookup used as the oracle for pixel colors
function tableLookup(t: number): [number, number, number] {
  const pos = Math.min(1, Math.max(0, t)) * (VIRIDIS_ANCHORS.length - 1);
  const lo = Math.floor(pos);
  const hi = Math.min(lo + 1, VIRIDIS_ANCHORS.length - 1);
  const frac = pos - lo;
  return [0, 1, 2].map((c) =>
    Math.round(VIRIDIS_ANCHORS[lo][c] + (VIRIDIS_ANCHORS[hi][c] - VIRIDIS_ANCHORS[lo][c]) * frac),
  ) as [number, number, number];
}

describe("percentile clipping", () => {
  it("identity clip (0, 100) keeps the full range", () => {
    const values = [5, 1, 9, 3];
    expect(clipBounds(values, 0, 100)).toEqual([1, 9]);
  });

  it("interpolates interior percentiles", () => {
    expect(percentile([0, 10], 50)).toBeCloseTo(5);
    expect(percentile([0, 1, 2, 3, 4], 25)).toBeCloseTo(1);
  });

  it("normalize degenerates to mid tone on constant input", () => {
    expect(normalize(7, 7, 7)).toBe(0.5);
  });
});

describe("renderHeatmap", () => {
  it("renders a constant matrix as one uniform color without crashing", () => {
    const result = renderHeatmap(payload(3, 3, new Array(9).fill(4.2)));
    expect(isHeatmapError(result)).toBe(false);
    const img = result as HeatmapImage;
    const first = [img.pixels[0], img.pixels[1], img.pixels[2]];
    for (let i = 0; i < 9; i++) {
      expect([img.pixels[i * 4], img.pixels[i * 4 + 1], img.pixels[i * 4 + 2]]).toEqual(first);
      expect(img.pixels[i * 4 + 3]).toBe(255);
    }
  });

  it("maps a known 2x2 payload through the documented colormap table", () => {
    const result = renderHeatmap(payload(2, 2, [0, 1, 2, 3]), [0, 100]) as HeatmapImage;
    const expected = [0, 1 / 3, 2 / 3, 1].map(tableLookup);
    for (let i = 0; i < 4; i++) {
      expect([
        result.pixels[i * 4],
        result.pixels[i * 4 + 1],
        result.pixels[i * 4 + 2],
      ]).toEqual(expected[i]);
    }
  });

  it("clip (0, 100) maps extremes to the table endpoints", () => {
    const result = renderHeatmap(payload(1, 2, [-3, 12]), [0, 100]) as HeatmapImage;
    expect([result.pixels[0], result.pixels[1], result.pixels[2]]).toEqual(VIRIDIS_ANCHORS[0]);
    expect([result.pixels[4], result.pixels[5], result.pixels[6]]).toEqual(
      VIRIDIS_ANCHORS[VIRIDIS_ANCHORS.length - 1],
    );
  });

  it("percentile clip saturates outliers", () => {
    const values = [...new Array(98).fill(1), -1000, 1000];
    const result = renderHeatmap(payload(10, 10, values), [1, 99]) as HeatmapImage;
    expect(result.lo).toBeGreaterThan(-1000);
    expect(result.hi).toBeLessThan(1000);
  });

  it("overlays accepted matches as markers", () => {
    const accepted: MatchEntry[] = [
      { query: 1, reference: 0, score: 0, strength: 1, uniqueness: null, accepted: true },
      { query: 0, reference: 1, score: 0, strength: 1, uniqueness: null, accepted: false },
    ];
    const result = renderHeatmap(payload(2, 2, [0, 1, 2, 3]), [0, 100], accepted) as HeatmapImage;
    // accepted (reference 0, query 1) -> row 0, col 1 painted as the marker
    expect([result.pixels[4], result.pixels[5], result.pixels[6]]).toEqual([255, 64, 64]);
    // the rejected one is left untouched
    expect([result.pixels[8], result.pixels[9], result.pixels[10]]).toEqual(tableLookup(2 / 3));
  });

  it("returns an error result on malformed payloads", () => {
    expect(isHeatmapError(renderHeatmap(payload(2, 2, [1, 2, 3])))).toBe(true);
    expect(isHeatmapError(renderHeatmap(payload(0, 2, [])))).toBe(true);
    expect(
      isHeatmapError(renderHeatmap({ ...payload(2, 2, [1, 2, 3, 4]), values: "x" as never })),
    ).toBe(true);
  });

  it("viridis clamps out-of-range inputs", () => {
    expect(viridis(-1)).toEqual(VIRIDIS_ANCHORS[0]);
    expect(viridis(2)).toEqual(VIRIDIS_ANCHORS[31]);
  });
});
