/**
 * Directory-batch adapter implementing the upscaling-backend subprocess
 * protocol: read every `*.png` in the input directory, write a same-named
 * PNG at exactly scale-times the dimensions into the output directory.
 *
 * Two modes, mutually exclusive:
 *  - an analytic method (nearest / bilinear / bicubic) runs in-process;
 *  - a wrapped command is spawned once with the protocol flags appended,
 *    delegating the whole directory to it.
 *
 * Every failure raises AdapterError with a diagnostic naming the offending
 *  file or command — a batch never fails silently or half-written-silently.
 */

import { spawnSync } from "node:child_process";
import * as fs from "node:fs";
import * as path from "node:path";

import { decodePng, encodePng } from "./png";
import { isMethod, Method, resize } from "./resize";

export class AdapterError extends Error {
  /** suggested process exit status */
  readonly exitStatus: number;

  constructor(message: string, exitStatus = 1) {
    super(message);
    this.name = "AdapterError";
    this.exitStatus = exitStatus;
  }
}

export interface AdapterConfig {
  method?: Method;
  wrappedCommand?: string[];
}

export function validateConfig(config: AdapterConfig): void {
  const hasMethod = config.method !== undefined;
  const hasWrap = config.wrappedCommand !== undefined;
  if (hasMethod === hasWrap) {
    throw new AdapterError("exactly one of method and wrapped command must be set", 2);
  }
  if (hasMethod && !isMethod(config.method as string)) {
    throw new AdapterError(`unknown method '${config.method}'`, 2);
  }
  if (hasWrap && (config.wrappedCommand as string[]).length === 0) {
    throw new AdapterError("wrapped command must not be empty", 2);
  }
}

function listInputs(inputDir: string): string[] {
  let names: string[];
  try {
    names = fs.readdirSync(inputDir);
  } catch (err) {
    throw new AdapterError(`cannot read input directory ${inputDir}: ${String(err)}`);
  }
  return names.filter((n) => n.toLowerCase().endsWith(".png")).sort();
}

function runWrapped(
  inputDir: string,
  outputDir: string,
  scale: number,
  command: string[],
): void {
  const argv = [
    ...command,
    "--input-dir",
    inputDir,
    "--output-dir",
    outputDir,
    "--scale",
    String(scale),
  ];
  const child = spawnSync(argv[0], argv.slice(1), { stdio: "inherit" });
  if (child.error) {
    throw new AdapterError(`wrapped command failed to start: ${String(child.error)}`);
  }
  if (child.status !== 0) {
    throw new AdapterError(
      `wrapped command exited with status ${child.status}`,
      child.status ?? 1,
    );
  }
}

export function serveBatch(
  inputDir: string,
  outputDir: string,
  scale: number,
  config: AdapterConfig,
): void {
  validateConfig(config);
  if (!Number.isInteger(scale) || scale < 2) {
    throw new AdapterError(`scale must be an integer >= 2, got ${scale}`, 2);
  }
  if (config.wrappedCommand) {
    runWrapped(inputDir, outputDir, scale, config.wrappedCommand);
    return;
  }

  const names = listInputs(inputDir);
  try {
    fs.mkdirSync(outputDir, { recursive: true });
  } catch (err) {
    throw new AdapterError(`cannot create output directory ${outputDir}: ${String(err)}`);
  }
  for (const name of names) {
    const src = path.join(inputDir, name);
    let image;
    try {
      image = decodePng(fs.readFileSync(src));
    } catch (err) {
      throw new AdapterError(`unreadable input ${src}: ${String(err)}`);
    }
    const upscaled = resize(image, scale, config.method as Method);
    try {
      fs.writeFileSync(path.join(outputDir, name), encodePng(upscaled));
    } catch (err) {
      throw new AdapterError(`unwritable output ${path.join(outputDir, name)}: ${String(err)}`);
    }
  }
}
