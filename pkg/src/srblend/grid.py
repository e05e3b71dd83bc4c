"""Normalized image buffers and 8-bit PNG I/O.

Every stage of the pipeline operates on :class:`PixelGrid`, an immutable
real-valued buffer in the nominal range [0, 1]. All arithmetic (fusion,
ensemble averaging, resampling) stays in this domain; quantization to 8 bits
happens exactly once, at file write (or explicitly via :func:`quantize`), so
rounding error never compounds across stages.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"

# BT.601 studio-range luma coefficients, applied to RGB in [0, 1].
_LUMA_R = 65.481
_LUMA_G = 128.553
_LUMA_B = 24.966
_LUMA_OFFSET = 16.0


class UnsupportedImageError(Exception):
    """File is not an 8-bit grayscale or RGB PNG (alpha/palette/16-bit rejected)."""


class CorruptImageError(Exception):
    """File looks like a PNG but its stream cannot be decoded."""


class PixelGrid:
    """Immutable image buffer, shape (height, width, channels), channels in {1, 3}.

    Values are float64 and must be finite. They are nominally in [0, 1] but
    may overshoot (cubic kernels have negative lobes); clamping is the
    responsibility of :func:`save_image` / :func:`quantize`.
    """

    __slots__ = ("data",)

    def __init__(self, data) -> None:
        arr = np.asarray(data, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[:, :, np.newaxis]
        if arr.ndim != 3:
            raise ValueError(f"expected a 2D or 3D array, got shape {arr.shape}")
        if arr.shape[2] not in (1, 3):
            raise ValueError(f"channels must be 1 or 3, got {arr.shape[2]}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"empty image: shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("image contains non-finite values")
        arr = arr.copy()
        arr.flags.writeable = False
        self.data = arr

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    def __repr__(self) -> str:
        return f"PixelGrid({self.width}x{self.height}x{self.channels})"


def to_bytes(grid: PixelGrid) -> np.ndarray:
    """Quantize to uint8: clamp to [0, 1], scale by 255, round half away from zero."""
    clipped = np.clip(grid.data, 0.0, 1.0)
    # values are non-negative after the clamp, so floor(x + 0.5) is
    # exactly round-half-away-from-zero
    return np.floor(clipped * 255.0 + 0.5).astype(np.uint8)


def quantize(grid: PixelGrid) -> PixelGrid:
    """Snap every value onto the 8-bit lattice k/255, same rule as save_image."""
    return PixelGrid(to_bytes(grid) / 255.0)


def _check_png_header(path: Path) -> None:
    with open(path, "rb") as fh:
        head = fh.read(26)
    if len(head) < 8 or head[:8] != _PNG_MAGIC:
        raise UnsupportedImageError(f"{path}: not a PNG file")
    if len(head) < 26:
        raise CorruptImageError(f"{path}: truncated before IHDR")
    bit_depth, color_type = head[24], head[25]
    if bit_depth != 8:
        raise UnsupportedImageError(
            f"{path}: bit depth {bit_depth} unsupported, only 8-bit PNGs are accepted"
        )
    if color_type not in (0, 2):
        names = {3: "palette", 4: "grayscale+alpha", 6: "RGB+alpha"}
        kind = names.get(color_type, f"color type {color_type}")
        raise UnsupportedImageError(f"{path}: {kind} PNGs are rejected, not converted")


def load_image(path) -> PixelGrid:
    """Load an 8-bit grayscale or RGB PNG; values become stored byte / 255 exactly.

    Raises FileNotFoundError for a missing file, UnsupportedImageError for
    wrong bit depth / channel layout (including alpha), CorruptImageError for
    an undecodable stream.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such image file: {path}")
    _check_png_header(path)
    try:
        with Image.open(path) as im:
            im.load()
            arr = np.asarray(im, dtype=np.uint8)
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise CorruptImageError(f"{path}: undecodable PNG stream ({exc})") from exc
    if arr.ndim == 2:
        arr = arr[:, :, np.newaxis]
    return PixelGrid(arr / 255.0)


def save_image(grid: PixelGrid, path) -> None:
    """Write as 8-bit PNG (grayscale for 1 channel, RGB for 3)."""
    data = to_bytes(grid)
    if grid.channels == 1:
        im = Image.fromarray(data[:, :, 0], mode="L")
    else:
        im = Image.fromarray(data, mode="RGB")
    im.save(Path(path), format="PNG")


def to_luma(grid: PixelGrid) -> PixelGrid:
    """BT.601 Y channel: (65.481 R + 128.553 G + 24.966 B + 16) / 255, RGB in [0, 1]."""
    if grid.channels != 3:
        raise ValueError(f"to_luma needs a 3-channel grid, got {grid.channels}")
    r = grid.data[:, :, 0]
    g = grid.data[:, :, 1]
    b = grid.data[:, :, 2]
    y = (_LUMA_R * r + _LUMA_G * g + _LUMA_B * b + _LUMA_OFFSET) / 255.0
    return PixelGrid(y[:, :, np.newaxis])


def crop_border(grid: PixelGrid, margin: int) -> PixelGrid:
    """Remove `margin` pixels from every side; margin 0 returns an identical grid."""
    margin = int(margin)
    if margin < 0:
        raise ValueError(f"margin must be non-negative, got {margin}")
    if margin == 0:
        return PixelGrid(grid.data)
    if 2 * margin >= min(grid.width, grid.height):
        raise ValueError(
            f"margin {margin} too large for a {grid.width}x{grid.height} image"
        )
    return PixelGrid(grid.data[margin:-margin, margin:-margin, :])
