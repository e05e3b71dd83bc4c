#!/usr/bin/env node
/**
 * Command-line entry point for the reference upscaling backend.
 *
 * Exposes exactly the protocol flags plus the mode switch:
 *
 *   --input-dir D --output-dir E --scale N (--method M | --wrap "CMD ...")
 *
 * Exit status: 0 on success, 2 on usage errors, otherwise 1 (or the wrapped
 * command's own nonzero status when delegating).
 */

import { parseArgs } from "node:util";

import { AdapterConfig, AdapterError, serveBatch } from "./adapter";
import { METHODS } from "./resize";

const USAGE =
  "usage: reference-backend --input-dir D --output-dir E --scale N " +
  `(--method ${METHODS.join("|")} | --wrap "CMD ...")`;

/** Split a command string on whitespace, honoring single/double quotes. */
export function splitCommand(text: string): string[] {
  const parts: string[] = [];
  let current = "";
  let quote: string | null = null;
  let sawToken = false;
  for (const ch of text) {
    if (quote) {
      if (ch === quote) quote = null;
      else current += ch;
    } else if (ch === '"' || ch === "'") {
      quote = ch;
      sawToken = true;
    } else if (ch === " " || ch === "\t") {
      if (sawToken) parts.push(current);
      current = "";
      sawToken = false;
    } else {
      current += ch;
      sawToken = true;
    }
  }
  if (quote) throw new AdapterError(`unbalanced quote in command: ${text}`, 2);
  if (sawToken) parts.push(current);
  return parts;
}

export function main(argv: string[]): number {
  let values: Record<string, string | boolean | undefined>;
  try {
    ({ values } = parseArgs({
      args: argv,
      options: {
        "input-dir": { type: "string" },
        "output-dir": { type: "string" },
        scale: { type: "string" },
        method: { type: "string" },
        wrap: { type: "string" },
        help: { type: "boolean" },
      },
      strict: true,
      allowPositionals: false,
    }));
  } catch (err) {
    process.stderr.write(`error: ${err instanceof Error ? err.message : String(err)}\n${USAGE}\n`);
    return 2;
  }
  if (values.help) {
    process.stdout.write(`${USAGE}\n`);
    return 0;
  }

  try {
    const inputDir = values["input-dir"];
    const outputDir = values["output-dir"];
    const scaleText = values.scale;
    if (typeof inputDir !== "string" || typeof outputDir !== "string" || typeof scaleText !== "string") {
      throw new AdapterError("--input-dir, --output-dir, and --scale are required", 2);
    }
    const scale = Number(scaleText);
    const config: AdapterConfig = {};
    if (typeof values.method === "string") config.method = values.method as never;
    if (typeof values.wrap === "string") config.wrappedCommand = splitCommand(values.wrap);
    serveBatch(inputDir, outputDir, scale, config);
    return 0;
  } catch (err) {
    if (err instanceof AdapterError) {
      process.stderr.write(`error: ${err.message}\n`);
      if (err.exitStatus === 2) process.stderr.write(`${USAGE}\n`);
      return err.exitStatus;
    }
    process.stderr.write(`error: ${err instanceof Error ? err.message : String(err)}\n`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
