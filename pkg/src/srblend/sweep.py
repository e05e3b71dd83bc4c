"""Weight sweep over the fusion coefficient, operating-point selection, and
report emission: comparison tables, a CSV curve, and a self-contained SVG plot.

Per-alpha results are computed from the two cached branch outputs only —
fusing two images never requires re-running a backend — so sweeping a fine
grid is cheap relative to inference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .fusion import FusionWeight, fuse
from .metrics import INF_PSNR, MetricConfig, MetricReport, evaluate_pairs

CRITERION_PSNR = "psnr"
CRITERION_SSIM = "ssim"
_CRITERIA = (CRITERION_PSNR, CRITERION_SSIM)

DEFAULT_STEP = 0.01


@dataclass(frozen=True)
class SweepSample:
    alpha: float
    mean_psnr: float
    mean_ssim: float


@dataclass(frozen=True)
class SweepCurve:
    """Sweep samples (strictly increasing alpha, endpoints 0 and 1 included)
    plus the argmax alphas under each criterion (ties go to the smaller alpha)."""

    samples: tuple[SweepSample, ...]
    best_psnr_alpha: float
    best_ssim_alpha: float
    grid_step: float

    def __post_init__(self):
        if not self.samples:
            raise ValueError("curve must have at least one sample")
        alphas = [s.alpha for s in self.samples]
        if any(b <= a for a, b in zip(alphas, alphas[1:])):
            raise ValueError("sample alphas must be strictly increasing")
        if alphas[0] != 0.0 or alphas[-1] != 1.0:
            raise ValueError("samples must cover [0, 1] inclusive of both endpoints")
        if self.best_psnr_alpha != _argmax(self.samples, CRITERION_PSNR):
            raise ValueError("best_psnr_alpha does not attain the psnr maximum")
        if self.best_ssim_alpha != _argmax(self.samples, CRITERION_SSIM):
            raise ValueError("best_ssim_alpha does not attain the ssim maximum")

    def as_dict(self) -> dict:
        return {
            "samples": [
                {
                    "alpha": s.alpha,
                    "mean_psnr": "inf" if math.isinf(s.mean_psnr) else s.mean_psnr,
                    "mean_ssim": s.mean_ssim,
                }
                for s in self.samples
            ],
            "best_psnr_alpha": self.best_psnr_alpha,
            "best_ssim_alpha": self.best_ssim_alpha,
            "grid_step": self.grid_step,
        }


def _argmax(samples: tuple[SweepSample, ...], criterion: str) -> float:
    key = (lambda s: s.mean_psnr) if criterion == CRITERION_PSNR else (lambda s: s.mean_ssim)
    best = samples[0]
    for sample in samples[1:]:
        if key(sample) > key(best):
            best = sample
    return best.alpha


def _curve(samples: list[SweepSample], step: float) -> SweepCurve:
    return SweepCurve(
        samples=tuple(samples),
        best_psnr_alpha=_argmax(tuple(samples), CRITERION_PSNR),
        best_ssim_alpha=_argmax(tuple(samples), CRITERION_SSIM),
        grid_step=step,
    )


def alpha_grid(step: float) -> list[float]:
    """{0, step, 2*step, ...} up to and including 1.0 (appended when step
    does not divide 1 exactly)."""
    step = float(step)
    if not 0.0 < step <= 0.5:
        raise ValueError(f"step must lie in (0, 0.5], got {step}")
    n = round(1.0 / step)
    if abs(n * step - 1.0) <= 1e-9:
        return [i * step for i in range(n)] + [1.0]
    alphas = []
    i = 0
    while i * step < 1.0 - 1e-12:
        alphas.append(i * step)
        i += 1
    return alphas + [1.0]


def _as_map(name: str, images) -> dict:
    items = list(images.items()) if isinstance(images, dict) else list(images)
    mapping = dict(items)
    if len(mapping) != len(items):
        raise ValueError(f"duplicate ids in {name}")
    return mapping


def sweep(
    base_outputs,
    strong_outputs,
    truths,
    cfg: MetricConfig = MetricConfig(),
    step: float = DEFAULT_STEP,
) -> SweepCurve:
    """Fuse every image pair at each grid alpha and record the mean metrics.

    The endpoint samples equal the standalone branch evaluations bit-exactly
    because fuse returns exact copies at alpha 0 and 1.
    """
    base_map = _as_map("base outputs", base_outputs)
    strong_map = _as_map("strong outputs", strong_outputs)
    truth_map = _as_map("truths", truths)
    if not (set(base_map) == set(strong_map) == set(truth_map)):
        raise ValueError(
            "id mismatch across image sets: "
            f"base {sorted(base_map)}, strong {sorted(strong_map)}, truth {sorted(truth_map)}"
        )
    ids = sorted(base_map)
    truth_list = [(i, truth_map[i]) for i in ids]
    samples = []
    for alpha in alpha_grid(step):
        weight = FusionWeight(alpha)
        fused = [(i, fuse(base_map[i], strong_map[i], weight)) for i in ids]
        report = evaluate_pairs(fused, truth_list, cfg)
        samples.append(SweepSample(alpha, report.mean_psnr, report.mean_ssim))
    return _curve(samples, step)


def best_operating_point(curve: SweepCurve, criterion: str) -> FusionWeight:
    """Argmax alpha under the criterion; ties break toward the smaller alpha."""
    if criterion not in _CRITERIA:
        raise ValueError(f"criterion must be one of {_CRITERIA}, got {criterion!r}")
    return FusionWeight(_argmax(curve.samples, criterion))


@dataclass(frozen=True)
class ComparisonRow:
    label: str
    psnr: float
    ssim: float
    delta_psnr: float
    delta_ssim: float

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "psnr": self.psnr,
            "ssim": self.ssim,
            "delta_psnr": self.delta_psnr,
            "delta_ssim": self.delta_ssim,
        }


def _means(row) -> tuple[float, float]:
    if isinstance(row, MetricReport):
        return row.mean_psnr, row.mean_ssim
    p, s = row
    return float(p), float(s)


def comparison_table(rows, baseline_label: str) -> list[ComparisonRow]:
    """Deltas of every row against the named baseline, as exact differences
    (no rounding before subtraction). Rows are (label, MetricReport) or
    (label, (mean_psnr, mean_ssim)) pairs."""
    labels = [label for label, _ in rows]
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate row labels: {labels}")
    if baseline_label not in labels:
        raise ValueError(f"baseline {baseline_label!r} not among rows {labels}")
    baseline_psnr, baseline_ssim = _means(dict(rows)[baseline_label])
    return [
        ComparisonRow(
            label=label,
            psnr=p,
            ssim=s,
            delta_psnr=p - baseline_psnr,
            delta_ssim=s - baseline_ssim,
        )
        for label, (p, s) in ((label, _means(row)) for label, row in rows)
    ]


def format_comparison_table(rows: list[ComparisonRow]) -> str:
    """Aligned plain-text table: PSNR to 4 decimals, SSIM to 6."""
    width = max(len("method"), max(len(r.label) for r in rows))
    header = f"{'method':<{width}}  {'PSNR(dB)':>9}  {'SSIM':>9}  {'dPSNR':>8}  {'dSSIM':>9}"
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(
            f"{r.label:<{width}}  {r.psnr:>9.4f}  {r.ssim:>9.6f}  "
            f"{r.delta_psnr:>+8.4f}  {r.delta_ssim:>+9.6f}"
        )
    return "\n".join(lines)


def emit_curve(curve: SweepCurve, csv_path=None, svg_path=None) -> None:
    """Write the curve as CSV (header `alpha,psnr,ssim`, 6 decimals) and as a
    self-contained SVG line plot with dual y-axes and both best-point markers."""
    if csv_path is not None:
        lines = ["alpha,psnr,ssim"]
        lines += [
            f"{s.alpha:.6f},{s.mean_psnr:.6f},{s.mean_ssim:.6f}"
            for s in curve.samples
        ]
        Path(csv_path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    if svg_path is not None:
        Path(svg_path).write_text(render_curve_svg(curve), encoding="utf-8")


def load_curve_csv(path) -> SweepCurve:
    """Rebuild a SweepCurve from emit_curve's CSV output."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or lines[0] != "alpha,psnr,ssim":
        raise ValueError(f"{path}: expected header 'alpha,psnr,ssim'")
    samples = []
    for line in lines[1:]:
        alpha, p, s = line.split(",")
        samples.append(SweepSample(float(alpha), float(p), float(s)))
    step = samples[1].alpha - samples[0].alpha if len(samples) > 1 else 1.0
    return _curve(samples, step)


def _scaled(values: list[float], lo: float, hi: float) -> list[float]:
    finite = [v for v in values if math.isfinite(v)]
    vmin = min(finite) if finite else 0.0
    vmax = max(finite) if finite else 1.0
    if vmax - vmin < 1e-12:
        vmin -= 0.5
        vmax += 0.5
    out = []
    for v in values:
        v = vmax if math.isinf(v) else v
        out.append(hi + (lo - hi) * (v - vmin) / (vmax - vmin))
    return out


def render_curve_svg(curve: SweepCurve) -> str:
    """SVG 1.1 document: two polylines (psnr left axis, ssim right axis) and
    two circle markers at the best operating points."""
    width, height = 640, 400
    left, right, top, bottom = 64.0, 576.0, 28.0, 352.0

    alphas = [s.alpha for s in curve.samples]
    xs = [left + (right - left) * a for a in alphas]
    ys_p = _scaled([s.mean_psnr for s in curve.samples], top, bottom)
    ys_s = _scaled([s.mean_ssim for s in curve.samples], top, bottom)

    def points(xv, yv):
        return " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xv, yv))

    i_p = alphas.index(curve.best_psnr_alpha)
    i_s = alphas.index(curve.best_ssim_alpha)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="#1f77b4"/>',
        f'<line x1="{right}" y1="{top}" x2="{right}" y2="{bottom}" stroke="#d62728"/>',
        '<text x="320" y="390" text-anchor="middle" font-size="13">strong-branch weight</text>',
        '<text x="18" y="190" fill="#1f77b4" font-size="13" '
        'transform="rotate(-90 18 190)" text-anchor="middle">mean PSNR (dB)</text>',
        '<text x="622" y="190" fill="#d62728" font-size="13" '
        'transform="rotate(90 622 190)" text-anchor="middle">mean SSIM</text>',
        f'<polyline fill="none" stroke="#1f77b4" stroke-width="1.5" '
        f'points="{points(xs, ys_p)}"/>',
        f'<polyline fill="none" stroke="#d62728" stroke-width="1.5" '
        f'points="{points(xs, ys_s)}"/>',
        f'<circle class="best-psnr" cx="{xs[i_p]:.2f}" cy="{ys_p[i_p]:.2f}" '
        f'r="4" fill="#1f77b4"/>',
        f'<circle class="best-ssim" cx="{xs[i_s]:.2f}" cy="{ys_s[i_s]:.2f}" '
        f'r="4" fill="#d62728"/>',
        f'<text x="{xs[i_p]:.2f}" y="{ys_p[i_p] - 8:.2f}" fill="#1f77b4" '
        f'font-size="12" text-anchor="middle">best PSNR @ {curve.best_psnr_alpha:g}</text>',
        f'<text x="{xs[i_s]:.2f}" y="{ys_s[i_s] - 8:.2f}" fill="#d62728" '
        f'font-size="12" text-anchor="middle">best SSIM @ {curve.best_ssim_alpha:g}</text>',
        "</svg>",
    ]
    return "\n".join(parts) + "\n"
