"""Command-line surface tying the toolkit together.

Subcommands: degrade (make LR images), discover (pair existing HR/LR files),
run (full two-branch pipeline from a config file), fuse (blend two output
directories), sweep (weight sweep over two output directories), eval
(score SR outputs against ground truth), self-ensemble (geometric ensemble
around an external backend command).
"""

from __future__ import annotations

import argparse
import math
import shlex
import sys
from pathlib import Path

from .backend import KIND_EXTERNAL, BackendError, BackendSpec
from .d4 import self_ensemble_batch
from .dataset import (
    degrade_dataset,
    discover_pairs,
    load_manifest,
    save_manifest,
)
from .fusion import FusionWeight, fuse
from .grid import (
    CorruptImageError,
    UnsupportedImageError,
    load_image,
    save_image,
)
from .metrics import MODE_RGB, MODE_Y, MetricConfig, MetricReport, evaluate_pairs
from .pipeline import PipelineError, load_pipeline_config, run_pipeline
from .sweep import DEFAULT_STEP, SweepCurve, emit_curve
from .sweep import sweep as run_sweep


def _load_dir(directory) -> list[tuple[str, object]]:
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"directory not found: {directory}")
    paths = sorted(directory.glob("*.png"), key=lambda p: p.stem)
    if not paths:
        raise ValueError(f"no PNG images under {directory}")
    return [(p.stem, load_image(p)) for p in paths]


def _format_report(report: MetricReport) -> str:
    lines = [f"{'id':<16} {'PSNR(dB)':>9} {'SSIM':>9}"]
    for e in report.entries:
        p = "inf" if math.isinf(e.psnr) else f"{e.psnr:.4f}"
        lines.append(f"{e.image_id:<16} {p:>9} {e.ssim:>9.6f}")
    mp = "inf" if math.isinf(report.mean_psnr) else f"{report.mean_psnr:.4f}"
    lines.append(f"{'mean':<16} {mp:>9} {report.mean_ssim:>9.6f}")
    if report.infinite_psnr_count:
        lines.append(
            f"({report.infinite_psnr_count} identical pair(s) excluded from mean PSNR)"
        )
    return "\n".join(lines)


def _cmd_degrade(args) -> int:
    manifest = degrade_dataset(args.hr_dir, args.lr_dir, args.scale, pre_crop=args.pre_crop)
    manifest_path = Path(args.manifest) if args.manifest else Path(args.lr_dir) / "manifest.tsv"
    save_manifest(manifest, manifest_path)
    print(f"degraded {len(manifest.entries)} images at x{args.scale} into {args.lr_dir}")
    print(f"manifest: {manifest_path}")
    return 0


def _cmd_discover(args) -> int:
    manifest = discover_pairs(args.hr_dir, args.lr_dir, args.scale)
    manifest_path = Path(args.manifest) if args.manifest else Path(args.lr_dir) / "manifest.tsv"
    save_manifest(manifest, manifest_path)
    print(f"paired {len(manifest.entries)} images at x{args.scale}")
    print(f"manifest: {manifest_path}")
    return 0


def _cmd_run(args) -> int:
    cfg = load_pipeline_config(args.config, args.out)
    manifest = load_manifest(args.manifest, cfg.base.scale)
    result, artifacts = run_pipeline(manifest, cfg)
    if isinstance(result, SweepCurve):
        print(f"swept {len(result.samples)} weights (step {result.grid_step:g})")
        print(f"best psnr alpha: {result.best_psnr_alpha:g}")
        print(f"best ssim alpha: {result.best_ssim_alpha:g}")
    else:
        print(_format_report(result))
    print(f"report: {artifacts['report']}")
    return 0


def _cmd_fuse(args) -> int:
    base = _load_dir(args.base_dir)
    strong = _load_dir(args.strong_dir)
    if [i for i, _ in base] != [i for i, _ in strong]:
        raise ValueError(
            f"base and strong directories hold different image sets: "
            f"{[i for i, _ in base]} vs {[i for i, _ in strong]}"
        )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    weight = FusionWeight(args.alpha)
    for (image_id, b), (_, s) in zip(base, strong):
        save_image(fuse(b, s, weight), out / f"{image_id}.png")
    print(f"fused {len(base)} image pairs at alpha {args.alpha:g} into {out}")
    return 0


def _cmd_sweep(args) -> int:
    base = _load_dir(args.base_dir)
    strong = _load_dir(args.strong_dir)
    truths = _load_dir(args.hr_dir)
    curve = run_sweep(base, strong, truths, MetricConfig(), args.step)
    emit_curve(curve, args.csv, args.svg)
    print(f"swept {len(curve.samples)} weights (step {args.step:g})")
    print(f"best psnr alpha: {curve.best_psnr_alpha:g}")
    print(f"best ssim alpha: {curve.best_ssim_alpha:g}")
    if args.csv:
        print(f"csv: {args.csv}")
    if args.svg:
        print(f"svg: {args.svg}")
    return 0


def _cmd_eval(args) -> int:
    outputs = _load_dir(args.sr_dir)
    truths = _load_dir(args.hr_dir)
    cfg = MetricConfig(
        mode=MODE_Y if args.mode == "y" else MODE_RGB, border_crop=args.crop
    )
    print(_format_report(evaluate_pairs(outputs, truths, cfg)))
    return 0


def _cmd_self_ensemble(args) -> int:
    spec = BackendSpec(
        id="cli-backend",
        kind=KIND_EXTERNAL,
        scale=args.scale,
        command=tuple(shlex.split(args.backend)),
    )
    items = _load_dir(args.lr_dir)
    results = self_ensemble_batch(spec, items)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for image_id, grid in results:
        save_image(grid, out / f"{image_id}.png")
    print(f"self-ensembled {len(results)} images into {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="srblend",
        description="Training-free SR ensembling: branch backends, geometric "
        "self-ensemble, convex fusion, metrics, and weight sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("degrade", help="generate bicubic LR images from HR images")
    p.add_argument("--hr-dir", required=True)
    p.add_argument("--lr-dir", required=True)
    p.add_argument("--scale", required=True, type=int)
    p.add_argument("--pre-crop", action="store_true",
                   help="crop HR images to a multiple of scale instead of failing")
    p.add_argument("--manifest", default=None,
                   help="manifest output path (default: <lr-dir>/manifest.tsv)")
    p.set_defaults(func=_cmd_degrade)

    p = sub.add_parser("discover", help="pair existing HR and LR directories")
    p.add_argument("--hr-dir", required=True)
    p.add_argument("--lr-dir", required=True)
    p.add_argument("--scale", required=True, type=int)
    p.add_argument("--manifest", default=None,
                   help="manifest output path (default: <lr-dir>/manifest.tsv)")
    p.set_defaults(func=_cmd_discover)

    p = sub.add_parser("run", help="run the two-branch pipeline from a config file")
    p.add_argument("--manifest", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("fuse", help="convex-blend two directories of SR outputs")
    p.add_argument("--base-dir", required=True)
    p.add_argument("--strong-dir", required=True)
    p.add_argument("--alpha", required=True, type=float)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_fuse)

    p = sub.add_parser("sweep", help="sweep the fusion weight over two output sets")
    p.add_argument("--base-dir", required=True)
    p.add_argument("--strong-dir", required=True)
    p.add_argument("--hr-dir", required=True)
    p.add_argument("--step", type=float, default=DEFAULT_STEP)
    p.add_argument("--csv", default=None)
    p.add_argument("--svg", default=None)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("eval", help="score SR outputs against ground truth")
    p.add_argument("--sr-dir", required=True)
    p.add_argument("--hr-dir", required=True)
    p.add_argument("--mode", choices=("y", "rgb"), default="y")
    p.add_argument("--crop", type=int, default=None)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("self-ensemble",
                       help="geometric self-ensemble around an external backend")
    p.add_argument("--backend", required=True,
                   help="backend command line (protocol: --input-dir/--output-dir/--scale)")
    p.add_argument("--lr-dir", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--scale", required=True, type=int)
    p.set_defaults(func=_cmd_self_ensemble)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (
        ValueError,
        FileNotFoundError,
        BackendError,
        PipelineError,
        UnsupportedImageError,
        CorruptImageError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
