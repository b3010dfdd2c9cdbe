import { clipBounds, normalize, viridis } from "./colormap";
import type { MatchEntry, MatrixPayload } from "./types";

export interface HeatmapImage {
  width: number;
  height: number;
  /** RGBA, row-major, 4 bytes per cell (one pixel per matrix cell). */
  pixels: Uint8ClampedArray;
  lo: number;
  hi: number;
}

export interface HeatmapError {
  error: string;
}

export type HeatmapResult = HeatmapImage | HeatmapError;

export function isHeatmapError(r: HeatmapResult): r is HeatmapError {
  return (r as HeatmapError).error !== undefined;
}

const MARKER: [number, number, number] = [255, 64, 64];

/** Rasterize a matrix payload: percentile-clip, map through viridis, and
 * overlay accepted matches as markers. Pure; the caller blits the pixel
 * buffer onto a canvas. */
export function renderHeatmap(
  payload: MatrixPayload,
  clip: [number, number] = [1, 99],
  accepted: MatchEntry[] = [],
): HeatmapResult {
  if (
    !payload ||
    !Array.isArray(payload.values) ||
    !Number.isInteger(payload.n) ||
    !Number.isInteger(payload.m) ||
    payload.n < 1 ||
    payload.m < 1 ||
    payload.values.length !== payload.n * payload.m
  ) {
    return { error: "malformed matrix payload" };
  }
  const [lo, hi] = clipBounds(payload.values, clip[0], clip[1]);
  const pixels = new Uint8ClampedArray(payload.n * payload.m * 4);
  for (let i = 0; i < payload.values.length; i++) {
    const [r, g, b] = viridis(normalize(payload.values[i], lo, hi));
    pixels[i * 4] = r;
    pixels[i * 4 + 1] = g;
    pixels[i * 4 + 2] = b;
    pixels[i * 4 + 3] = 255;
  }
  const k = payload.downsample || 1;
  for (const match of accepted) {
    if (!match.accepted) continue;
    const row = Math.floor(match.reference / k);
    const col = Math.floor(match.query / k);
    if (row < 0 || row >= payload.n || col < 0 || col >= payload.m) continue;
    const i = (row * payload.m + col) * 4;
    pixels[i] = MARKER[0];
    pixels[i + 1] = MARKER[1];
    pixels[i + 2] = MARKER[2];
  }
  return { width: payload.m, height: payload.n, pixels, lo, hi };
}

/** Blit onto a canvas; draws an error panel instead when rendering failed. */
export function drawHeatmap(
  canvas: HTMLCanvasElement,
  result: HeatmapResult,
  scale = 4,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  if (isHeatmapError(result)) {
    canvas.width = 320;
    canvas.height = 48;
    ctx.fillStyle = "#fee";
    ctx.fillRect(0, 0, canvas.width, canvas.height);
    ctx.fillStyle = "#900";
    ctx.font = "13px sans-serif";
    ctx.fillText(result.error, 8, 28);
    return;
  }
  canvas.width = result.width * scale;
  canvas.height = result.height * scale;
  const base = new ImageData(
    Uint8ClampedArray.from(result.pixels) as Uint8ClampedArray<ArrayBuffer>,
    result.width,
    result.height,
  );
  const off = document.createElement("canvas");
  off.width = result.width;
  off.height = result.height;
  off.getContext("2d")?.putImageData(base, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(off, 0, 0, canvas.width, canvas.height);
}
