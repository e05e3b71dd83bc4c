/**
 * Minimal 8-bit image model and PNG I/O.
 *
 * Images are row-major, channel-interleaved byte arrays with 1 (grayscale)
 * or 3 (RGB) channels — the only shapes the upscaling protocol exchanges.
 * Decoding accepts anything pngjs can parse and collapses it to that model;
 * encoding writes 8-bit grayscale or truecolor with no alpha channel so the
 * output is consumable by strict loaders.
 */

import { PNG } from "pngjs";

export interface Image {
  width: number;
  height: number;
  channels: 1 | 3;
  /** length = width * height * channels */
  data: Uint8Array;
}

export function makeImage(width: number, height: number, channels: 1 | 3): Image {
  if (width < 1 || height < 1 || !Number.isInteger(width) || !Number.isInteger(height)) {
    throw new Error(`image dimensions must be positive integers, got ${width}x${height}`);
  }
  return { width, height, channels, data: new Uint8Array(width * height * channels) };
}

/** PNG colorType values whose samples are a single gray channel. */
const GRAY_COLOR_TYPES = new Set([0, 4]);

export function decodePng(buffer: Buffer): Image {
  const png = PNG.sync.read(buffer);
  const channels: 1 | 3 = GRAY_COLOR_TYPES.has(png.colorType ?? 6) ? 1 : 3;
  const out = makeImage(png.width, png.height, channels);
  const pixels = png.width * png.height;
  for (let i = 0; i < pixels; i++) {
    if (channels === 1) {
      out.data[i] = png.data[i * 4];
    } else {
      out.data[i * 3] = png.data[i * 4];
      out.data[i * 3 + 1] = png.data[i * 4 + 1];
      out.data[i * 3 + 2] = png.data[i * 4 + 2];
    }
  }
  return out;
}

export function encodePng(image: Image): Buffer {
  const png = new PNG({ width: image.width, height: image.height });
  const pixels = image.width * image.height;
  for (let i = 0; i < pixels; i++) {
    const r = image.channels === 1 ? image.data[i] : image.data[i * 3];
    const g = image.channels === 1 ? image.data[i] : image.data[i * 3 + 1];
    const b = image.channels === 1 ? image.data[i] : image.data[i * 3 + 2];
    png.data[i * 4] = r;
    png.data[i * 4 + 1] = g;
    png.data[i * 4 + 2] = b;
    png.data[i * 4 + 3] = 255;
  }
  return PNG.sync.write(png, { colorType: image.channels === 1 ? 0 : 2 });
}
