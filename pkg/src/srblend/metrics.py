"""PSNR and SSIM with the evaluation conventions pinned down and documented.

Conventions (each configurable via MetricConfig):
  - metrics run on quantized (8-bit-rounded) values by default, so in-memory
    results match results computed after a save/load roundtrip bit-exactly;
  - color images are reduced to the BT.601 luma channel unless rgb mode is
    chosen (rgb mode averages the three per-channel SSIMs);
  - a border is cropped first (SR evaluation conventionally crops `scale`
    pixels; border_crop=None resolves to the scale factor where one is in
    scope, and to 0 in scale-free contexts).

PSNR is 10 * log10(1 / MSE) on the [0,1] domain; identical inputs yield the
infinity sentinel. SSIM uses an 11x11 Gaussian window with sigma 1.5,
C1 = (0.01)^2 and C2 = (0.03)^2 at dynamic range 1, and valid-region
(unpadded) windows — padding conventions shift the third decimal, so the
choice is fixed here rather than left to a dependency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .grid import PixelGrid, crop_border, quantize, to_luma

INF_PSNR = float("inf")

MODE_Y = "y-channel"
MODE_RGB = "rgb"
_MODES = (MODE_Y, MODE_RGB)

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
_C1 = 0.01**2
_C2 = 0.03**2


@dataclass(frozen=True)
class MetricConfig:
    mode: str = MODE_Y
    border_crop: int | None = None
    quantize_before_metric: bool = True

    def __post_init__(self):
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}, got {self.mode!r}")
        if self.border_crop is not None and int(self.border_crop) < 0:
            raise ValueError(f"border_crop must be >= 0, got {self.border_crop}")

    def resolved(self, scale: int | None = None) -> "MetricConfig":
        """Pin border_crop: None becomes the scale factor (or 0 without one)."""
        if self.border_crop is not None:
            return self
        return replace(self, border_crop=int(scale) if scale else 0)


@dataclass(frozen=True)
class ImageScore:
    image_id: str
    psnr: float
    ssim: float


@dataclass(frozen=True)
class MetricReport:
    """Per-image scores (sorted by id) plus arithmetic means.

    Infinite PSNR entries (identical image pairs) are excluded from mean_psnr
    and counted in infinite_psnr_count so degenerate pairs stay visible
    instead of poisoning the aggregate. If every entry is infinite, mean_psnr
    is the infinity sentinel itself.
    """

    entries: tuple[ImageScore, ...]
    mean_psnr: float
    mean_ssim: float
    infinite_psnr_count: int
    config: MetricConfig

    def as_dict(self) -> dict:
        return {
            "per_image": [
                {"id": e.image_id, "psnr": _json_safe(e.psnr), "ssim": e.ssim}
                for e in self.entries
            ],
            "mean_psnr": _json_safe(self.mean_psnr),
            "mean_ssim": self.mean_ssim,
            "infinite_psnr_count": self.infinite_psnr_count,
            "config": {
                "mode": self.config.mode,
                "border_crop": self.config.border_crop,
                "quantize_before_metric": self.config.quantize_before_metric,
            },
        }


def _json_safe(value: float):
    return "inf" if math.isinf(value) else value


def _preprocess(grid: PixelGrid, cfg: MetricConfig) -> np.ndarray:
    if cfg.quantize_before_metric:
        grid = quantize(grid)
    if cfg.mode == MODE_Y and grid.channels == 3:
        grid = to_luma(grid)
    crop = 0 if cfg.border_crop is None else int(cfg.border_crop)
    if crop:
        grid = crop_border(grid, crop)
    return grid.data


def _check_shapes(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape != y.shape:
        raise ValueError(f"images differ after preprocessing: {x.shape} vs {y.shape}")


def psnr(a: PixelGrid, b: PixelGrid, cfg: MetricConfig = MetricConfig()) -> float:
    """10 * log10(1 / MSE) in dB on [0,1]; INF_PSNR when the images match."""
    x = _preprocess(a, cfg)
    y = _preprocess(b, cfg)
    _check_shapes(x, y)
    mse = float(np.mean((x - y) ** 2))
    if mse == 0.0:
        return INF_PSNR
    return 10.0 * math.log10(1.0 / mse)


_WINDOW_1D: np.ndarray


def _gaussian_window() -> np.ndarray:
    half = (SSIM_WINDOW - 1) / 2.0
    x = np.arange(SSIM_WINDOW, dtype=np.float64) - half
    g = np.exp(-(x * x) / (2.0 * SSIM_SIGMA**2))
    return g / g.sum()


_WINDOW_1D = _gaussian_window()


def _filter_valid(img: np.ndarray) -> np.ndarray:
    """Separable valid-region correlation with the normalized Gaussian window."""
    h, w = img.shape
    n = SSIM_WINDOW
    rows = np.zeros((h, w - n + 1), dtype=np.float64)
    for j in range(n):
        rows += _WINDOW_1D[j] * img[:, j : w - n + 1 + j]
    out = np.zeros((h - n + 1, w - n + 1), dtype=np.float64)
    for i in range(n):
        out += _WINDOW_1D[i] * rows[i : h - n + 1 + i, :]
    return out


def _ssim_single(x: np.ndarray, y: np.ndarray) -> float:
    if min(x.shape) < SSIM_WINDOW:
        raise ValueError(
            f"image {x.shape[1]}x{x.shape[0]} is smaller than the "
            f"{SSIM_WINDOW}x{SSIM_WINDOW} SSIM window after cropping"
        )
    mu_x = _filter_valid(x)
    mu_y = _filter_valid(y)
    mu_xx = mu_x * mu_x
    mu_yy = mu_y * mu_y
    mu_xy = mu_x * mu_y
    var_x = _filter_valid(x * x) - mu_xx
    var_y = _filter_valid(y * y) - mu_yy
    cov = _filter_valid(x * y) - mu_xy
    num = (2.0 * mu_xy + _C1) * (2.0 * cov + _C2)
    den = (mu_xx + mu_yy + _C1) * (var_x + var_y + _C2)
    return float(np.mean(num / den))


def ssim(a: PixelGrid, b: PixelGrid, cfg: MetricConfig = MetricConfig()) -> float:
    """Mean SSIM over valid window positions (per-channel average in rgb mode)."""
    x = _preprocess(a, cfg)
    y = _preprocess(b, cfg)
    _check_shapes(x, y)
    channels = x.shape[2]
    return sum(
        _ssim_single(x[:, :, c], y[:, :, c]) for c in range(channels)
    ) / channels


def evaluate_pairs(
    outputs: list[tuple[str, PixelGrid]],
    truths: list[tuple[str, PixelGrid]],
    cfg: MetricConfig = MetricConfig(),
) -> MetricReport:
    """Score every output against the same-id truth; aggregate arithmetic means."""
    out_map = dict(outputs)
    truth_map = dict(truths)
    if len(out_map) != len(outputs) or len(truth_map) != len(truths):
        raise ValueError("duplicate ids in outputs or truths")
    missing = sorted(set(truth_map) - set(out_map))
    extra = sorted(set(out_map) - set(truth_map))
    if missing or extra:
        raise ValueError(
            f"id mismatch between outputs and truths: missing {missing}, extra {extra}"
        )
    if not out_map:
        raise ValueError("no image pairs to evaluate")
    entries = tuple(
        ImageScore(
            image_id,
            psnr(out_map[image_id], truth_map[image_id], cfg),
            ssim(out_map[image_id], truth_map[image_id], cfg),
        )
        for image_id in sorted(out_map)
    )
    finite = [e.psnr for e in entries if math.isfinite(e.psnr)]
    mean_psnr = sum(finite) / len(finite) if finite else INF_PSNR
    mean_ssim = sum(e.ssim for e in entries) / len(entries)
    return MetricReport(
        entries=entries,
        mean_psnr=mean_psnr,
        mean_ssim=mean_ssim,
        infinite_psnr_count=len(entries) - len(finite),
        config=cfg,
    )
