"""Bicubic resampling with the conventions published LR/HR benchmark pairs assume.

Downscaling uses the a = -0.5 cubic convolution kernel with antialiasing
(kernel support and argument stretched by the scale factor, weights
renormalized per output pixel), clamp-to-edge replication, and the
pixel-center alignment x_src = (x_dst + 0.5) * scale - 0.5. This matches the
de-facto convention under which published bicubic x4 pairs are reproducible.
Upscaling shares the alignment but applies no antialias stretch.

Outputs are not clamped; the kernel's negative lobes may push values outside
[0, 1] and clamping belongs to the save path.
"""

from __future__ import annotations

import numpy as np

from .grid import PixelGrid


def cubic_kernel(x):
    """Cubic convolution kernel with a = -0.5.

    1.5|x|^3 - 2.5|x|^2 + 1 on |x| <= 1, -0.5|x|^3 + 2.5|x|^2 - 4|x| + 2 on
    1 < |x| < 2, zero elsewhere. Accepts scalars or arrays.
    """
    scalar = np.ndim(x) == 0
    ax = np.abs(np.asarray(x, dtype=np.float64))
    out = np.zeros_like(ax)
    near = ax <= 1.0
    mid = (ax > 1.0) & (ax < 2.0)
    a_near = ax[near]
    out[near] = (1.5 * a_near - 2.5) * a_near * a_near + 1.0
    a_mid = ax[mid]
    out[mid] = ((-0.5 * a_mid + 2.5) * a_mid - 4.0) * a_mid + 2.0
    return float(out) if scalar else out


def _check_scale(scale: int) -> int:
    scale = int(scale)
    if scale < 2:
        raise ValueError(f"scale factor must be >= 2, got {scale}")
    return scale


def _contributions(n_in: int, n_out: int, antialias: bool):
    """Tap indices and normalized weights for one axis.

    Returns (taps, weights), each of shape (n_out, P). Out-of-range taps are
    clamped to the edge, which realizes clamp-to-edge replication because
    their weights accumulate onto the border pixel.
    """
    ratio = n_in / n_out
    kscale = ratio if (antialias and ratio > 1.0) else 1.0
    centers = (np.arange(n_out) + 0.5) * ratio - 0.5
    radius = 2.0 * kscale
    left = np.floor(centers - radius).astype(np.int64) + 1
    ntaps = int(np.ceil(2.0 * radius)) + 1
    taps = left[:, np.newaxis] + np.arange(ntaps)[np.newaxis, :]
    weights = cubic_kernel((centers[:, np.newaxis] - taps) / kscale)
    weights = weights / weights.sum(axis=1, keepdims=True)
    taps = np.clip(taps, 0, n_in - 1)
    return taps, weights


def _resample_axis(arr: np.ndarray, axis: int, n_out: int, antialias: bool) -> np.ndarray:
    arr = np.moveaxis(arr, axis, 0)
    taps, weights = _contributions(arr.shape[0], n_out, antialias)
    shape = (n_out,) + arr.shape[1:]
    out = np.zeros(shape, dtype=np.float64)
    wshape = (-1,) + (1,) * (arr.ndim - 1)
    for t in range(taps.shape[1]):
        out += weights[:, t].reshape(wshape) * arr[taps[:, t]]
    return np.moveaxis(out, 0, axis)


def downscale(grid: PixelGrid, scale: int) -> PixelGrid:
    """Antialiased bicubic downscale by an integer factor.

    Width and height must be divisible by the scale; silent cropping would
    corrupt pairing audits, so non-divisible dimensions are an error.
    """
    scale = _check_scale(scale)
    if grid.width % scale or grid.height % scale:
        raise ValueError(
            f"dimensions {grid.width}x{grid.height} not divisible by scale {scale}"
        )
    out = _resample_axis(grid.data, 0, grid.height // scale, antialias=True)
    out = _resample_axis(out, 1, grid.width // scale, antialias=True)
    return PixelGrid(out)


def upscale(grid: PixelGrid, scale: int) -> PixelGrid:
    """Bicubic upscale by an integer factor (no antialias stretch)."""
    scale = _check_scale(scale)
    out = _resample_axis(grid.data, 0, grid.height * scale, antialias=False)
    out = _resample_axis(out, 1, grid.width * scale, antialias=False)
    return PixelGrid(out)
