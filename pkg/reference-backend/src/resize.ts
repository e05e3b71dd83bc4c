/**
 * Analytic integer-factor upscalers: nearest, bilinear, bicubic.
 *
 * All three share the half-pixel center convention
 * `src = (dst + 0.5) / scale - 0.5` with clamp-to-edge taps. Interpolation
 * runs in float64 on [0,1]-normalized samples, separably (rows then
 * columns), and quantizes once at the end with round-half-up. Nearest is a
 * pure byte copy (block replication), so it is bit-exact by construction.
 */

import { Image, makeImage } from "./png";

export const METHODS = ["nearest", "bilinear", "bicubic"] as const;
export type Method = (typeof METHODS)[number];

export function isMethod(value: string): value is Method {
  return (METHODS as readonly string[]).includes(value);
}

function triangle(t: number): number {
  const x = Math.abs(t);
  return x < 1 ? 1 - x : 0;
}

/** Keys cubic kernel with a = -0.5. */
function cubic(t: number): number {
  const x = Math.abs(t);
  if (x <= 1) return 1.5 * x * x * x - 2.5 * x * x + 1;
  if (x < 2) return -0.5 * (x * x * x - 5 * x * x + 8 * x - 4);
  return 0;
}

interface AxisTaps {
  /** srcIndices[dst * tapCount + k], clamped to the axis */
  srcIndices: Int32Array;
  /** normalized kernel weights, same layout */
  weights: Float64Array;
  tapCount: number;
}

function axisTaps(
  srcLen: number,
  scale: number,
  kernel: (t: number) => number,
  support: number,
): AxisTaps {
  const dstLen = srcLen * scale;
  const tapCount = 2 * support;
  const srcIndices = new Int32Array(dstLen * tapCount);
  const weights = new Float64Array(dstLen * tapCount);
  for (let dst = 0; dst < dstLen; dst++) {
    const center = (dst + 0.5) / scale - 0.5;
    const left = Math.floor(center - support) + 1;
    let sum = 0;
    for (let k = 0; k < tapCount; k++) {
      const w = kernel(center - (left + k));
      weights[dst * tapCount + k] = w;
      sum += w;
      const clamped = Math.min(srcLen - 1, Math.max(0, left + k));
      srcIndices[dst * tapCount + k] = clamped;
    }
    for (let k = 0; k < tapCount; k++) {
      weights[dst * tapCount + k] /= sum;
    }
  }
  return { srcIndices, weights, tapCount };
}

function quantize(v: number): number {
  return Math.min(255, Math.max(0, Math.floor(v * 255 + 0.5)));
}

function nearestResize(img: Image, scale: number): Image {
  const out = makeImage(img.width * scale, img.height * scale, img.channels);
  const c = img.channels;
  for (let y = 0; y < out.height; y++) {
    const sy = Math.floor(y / scale);
    for (let x = 0; x < out.width; x++) {
      const sx = Math.floor(x / scale);
      for (let ch = 0; ch < c; ch++) {
        out.data[(y * out.width + x) * c + ch] = img.data[(sy * img.width + sx) * c + ch];
      }
    }
  }
  return out;
}

function kernelResize(
  img: Image,
  scale: number,
  kernel: (t: number) => number,
  support: number,
): Image {
  const c = img.channels;
  const rows = axisTaps(img.height, scale, kernel, support);
  const cols = axisTaps(img.width, scale, kernel, support);
  const outH = img.height * scale;
  const outW = img.width * scale;

  // pass 1: stretch rows (height), keep width; float64 working plane
  const mid = new Float64Array(outH * img.width * c);
  for (let y = 0; y < outH; y++) {
    for (let x = 0; x < img.width; x++) {
      for (let ch = 0; ch < c; ch++) {
        let acc = 0;
        for (let k = 0; k < rows.tapCount; k++) {
          const sy = rows.srcIndices[y * rows.tapCount + k];
          acc +=
            rows.weights[y * rows.tapCount + k] *
            (img.data[(sy * img.width + x) * c + ch] / 255);
        }
        mid[(y * img.width + x) * c + ch] = acc;
      }
    }
  }

  // pass 2: stretch columns (width), quantize
  const out = makeImage(outW, outH, img.channels);
  for (let y = 0; y < outH; y++) {
    for (let x = 0; x < outW; x++) {
      for (let ch = 0; ch < c; ch++) {
        let acc = 0;
        for (let k = 0; k < cols.tapCount; k++) {
          const sx = cols.srcIndices[x * cols.tapCount + k];
          acc += cols.weights[x * cols.tapCount + k] * mid[(y * img.width + sx) * c + ch];
        }
        out.data[(y * outW + x) * c + ch] = quantize(acc);
      }
    }
  }
  return out;
}

export function resize(img: Image, scale: number, method: Method): Image {
  if (!Number.isInteger(scale) || scale < 2) {
    throw new Error(`scale must be an integer >= 2, got ${scale}`);
  }
  switch (method) {
    case "nearest":
      return nearestResize(img, scale);
    case "bilinear":
      return kernelResize(img, scale, triangle, 1);
    case "bicubic":
      return kernelResize(img, scale, cubic, 2);
  }
}
