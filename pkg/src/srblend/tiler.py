"""Overlap-tile orchestration: run a backend over a large image tile by tile.

The image is split into overlapping square tiles (edge tiles shift inward so
the backend never sees synthetic padding), each tile is upscaled
independently, and the upscaled tiles are stitched with linear feather
weights. The feather ramps across the overlap band following a half-pixel-
centered line, weight(d) = (d + 0.5) / V with V = overlap * scale, so the
two ramps meeting across a regular overlap sum to exactly 1; irregular
overlaps from inward-shifted edge tiles are handled by normalizing with the
accumulated weight sum, which keeps the blend a partition of unity
everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backend import BackendSpec, run_backend_batch
from .grid import PixelGrid

DEFAULT_TILE_SIZE = 256
DEFAULT_OVERLAP = 16


@dataclass(frozen=True)
class TileLayout:
    """Tiling of a source image; rects are (top, left, height, width) in LR pixels."""

    height: int
    width: int
    tile_size: int
    overlap: int
    rects: tuple[tuple[int, int, int, int], ...]


def tile_offsets(dim: int, tile: int, overlap: int) -> list[int]:
    """1-D tile start offsets: fixed stride tile-overlap, last tile shifted inward."""
    if dim < 1:
        raise ValueError(f"dimension must be positive, got {dim}")
    tile = min(tile, dim)
    if tile == dim:
        return [0]  # single tile covers the axis; stride is irrelevant
    step = tile - overlap
    if step <= 0:
        raise ValueError(
            f"overlap {overlap} leaves no forward stride for tile size {tile}"
        )
    offsets = list(range(0, dim - tile + 1, step))
    if offsets[-1] != dim - tile:
        offsets.append(dim - tile)
    return offsets


def split(
    grid: PixelGrid,
    tile_size: int = DEFAULT_TILE_SIZE,
    overlap: int = DEFAULT_OVERLAP,
) -> tuple[list[PixelGrid], TileLayout]:
    """Cut the grid into overlapping tiles (copies), row-major layout order."""
    tile_size = int(tile_size)
    overlap = int(overlap)
    if tile_size <= 0:
        raise ValueError(f"tile size must be positive, got {tile_size}")
    if not 0 <= overlap < tile_size:
        raise ValueError(
            f"overlap must satisfy 0 <= overlap < tile size, got {overlap} vs {tile_size}"
        )
    tile_h = min(tile_size, grid.height)
    tile_w = min(tile_size, grid.width)
    rects = tuple(
        (top, left, tile_h, tile_w)
        for top in tile_offsets(grid.height, tile_size, overlap)
        for left in tile_offsets(grid.width, tile_size, overlap)
    )
    tiles = [PixelGrid(grid.data[t : t + h, l : l + w, :]) for t, l, h, w in rects]
    layout = TileLayout(grid.height, grid.width, tile_size, overlap, rects)
    return tiles, layout


def _axis_ramp(offset: int, length: int, dim: int, feather_px: int) -> np.ndarray:
    """Blend weights along one HR axis of a tile: 1 in the interior, ramping
    down toward any edge that adjoins a neighboring tile (image borders stay 1)."""
    w = np.ones(length, dtype=np.float64)
    if feather_px <= 0:
        return w
    d = np.arange(length, dtype=np.float64)
    if offset > 0:
        w = np.minimum(w, (d + 0.5) / feather_px)
    if offset + length < dim:
        w = np.minimum(w, (length - 0.5 - d) / feather_px)
    return w


def feather_field(layout: TileLayout, index: int, scale: int) -> np.ndarray:
    """Unnormalized 2-D feather weights for one tile, at HR resolution."""
    top, left, h, w = layout.rects[index]
    feather_px = layout.overlap * scale
    rows = _axis_ramp(top * scale, h * scale, layout.height * scale, feather_px)
    cols = _axis_ramp(left * scale, w * scale, layout.width * scale, feather_px)
    return np.outer(rows, cols)


def stitch(tiles: list[PixelGrid], layout: TileLayout, scale: int) -> PixelGrid:
    """Blend upscaled tiles back into one image; weights sum to 1 everywhere."""
    scale = int(scale)
    if scale < 1:
        raise ValueError(f"scale must be >= 1, got {scale}")
    if len(tiles) != len(layout.rects):
        raise ValueError(f"got {len(tiles)} tiles for {len(layout.rects)} layout rects")
    if not tiles:
        raise ValueError("cannot stitch an empty tile list")
    channels = tiles[0].channels
    out_h = layout.height * scale
    out_w = layout.width * scale
    acc = np.zeros((out_h, out_w, channels), dtype=np.float64)
    wsum = np.zeros((out_h, out_w, 1), dtype=np.float64)
    for i, (tile, (top, left, h, w)) in enumerate(zip(tiles, layout.rects)):
        if tile.height != h * scale or tile.width != w * scale:
            raise ValueError(
                f"tile {i} is {tile.width}x{tile.height}, layout expects "
                f"{w * scale}x{h * scale}"
            )
        if tile.channels != channels:
            raise ValueError(f"tile {i} has {tile.channels} channels, expected {channels}")
        field = feather_field(layout, i, scale)[:, :, np.newaxis]
        rs, cs = top * scale, left * scale
        acc[rs : rs + h * scale, cs : cs + w * scale, :] += tile.data * field
        wsum[rs : rs + h * scale, cs : cs + w * scale, :] += field
    if not np.all(wsum > 0.0):
        raise ValueError("tile layout does not cover the full image")
    return PixelGrid(acc / wsum)


def tiled_run(
    spec: BackendSpec,
    grid: PixelGrid,
    tile_size: int = DEFAULT_TILE_SIZE,
    overlap: int = DEFAULT_OVERLAP,
) -> PixelGrid:
    """split -> one batched backend invocation over all tiles -> stitch."""
    tiles, layout = split(grid, tile_size, overlap)
    results = run_backend_batch(
        spec, [(f"tile-{i:04d}", tile) for i, tile in enumerate(tiles)]
    )
    return stitch([out for _, out in results], layout, spec.scale)
