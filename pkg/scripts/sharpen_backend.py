#!/usr/bin/env python3
"""Example external upscaling backend: bicubic + unsharp masking.

Implements the subprocess contract the orchestrator expects of any
backend: read every PNG in --input-dir, write a same-named PNG of exactly
scale-times the size into --output-dir, exit 0 on success. Plug it into a
run with e.g.

    strong.backend = external
    strong.command = python3 scripts/sharpen_backend.py --amount 1.5

The sharpening deliberately overshoots edges, so blending its output with
plain bicubic at a partial weight usually beats either branch alone —
a cheap stand-in for a detail-heavy model when exercising the pipeline.
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from srblend.grid import PixelGrid, load_image, save_image
from srblend.resample import upscale


def blur3(data: np.ndarray) -> np.ndarray:
    """Separable 3x3 [1,2,1]/4 blur with edge clamping."""
    padded = np.pad(data, ((1, 1), (0, 0), (0, 0)), mode="edge")
    data = (padded[:-2] + 2 * padded[1:-1] + padded[2:]) / 4.0
    padded = np.pad(data, ((0, 0), (1, 1), (0, 0)), mode="edge")
    return (padded[:, :-2] + 2 * padded[:, 1:-1] + padded[:, 2:]) / 4.0


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--input-dir", required=True)
    parser.add_argument("--output-dir", required=True)
    parser.add_argument("--scale", required=True, type=int)
    parser.add_argument("--amount", type=float, default=1.5,
                        help="unsharp-mask strength (0 = plain bicubic)")
    args = parser.parse_args()

    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for path in sorted(Path(args.input_dir).glob("*.png")):
        up = upscale(load_image(path), args.scale).data
        sharpened = up + args.amount * (up - blur3(up))
        save_image(PixelGrid(np.clip(sharpened, 0.0, 1.0)), out_dir / path.name)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
