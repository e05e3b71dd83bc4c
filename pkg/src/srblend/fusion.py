"""Convex output-space fusion of SR branches, plus the MSE-optimal weight.

The fused image is (1 - alpha) * base + alpha * strong, computed in the real
domain with no clamping: both branches originate from 8-bit files, so the
convex combination stays in range anyway, and keeping the operation linear
preserves the quadratic shape of MSE as a function of alpha exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import PixelGrid


class IdenticalBranchesError(ValueError):
    """Base and strong are exactly equal, so no blend weight is identifiable."""


@dataclass(frozen=True)
class FusionWeight:
    """Weight of the strong branch; the base branch carries 1 - alpha."""

    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not 0.0 <= a <= 1.0:  # also rejects NaN
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)


def _check_same_dims(*grids: PixelGrid) -> None:
    shapes = {g.data.shape for g in grids}
    if len(shapes) != 1:
        raise ValueError(f"grids must share dimensions, got {sorted(shapes)}")


def fuse(base: PixelGrid, strong: PixelGrid, weight: FusionWeight) -> PixelGrid:
    """Per-pixel convex combination; endpoints return exact copies."""
    _check_same_dims(base, strong)
    a = weight.alpha
    if a == 0.0:
        return PixelGrid(base.data)
    if a == 1.0:
        return PixelGrid(strong.data)
    return PixelGrid((1.0 - a) * base.data + a * strong.data)


def fuse_many(branches: list[PixelGrid], weights: list[float]) -> PixelGrid:
    """Convex combination of any number of branches.

    Weights must be non-negative and sum to 1 within 1e-9. Two-branch calls
    delegate to fuse so both entry points are bit-identical.
    """
    if not branches:
        raise ValueError("need at least one branch")
    if len(branches) != len(weights):
        raise ValueError(f"{len(branches)} branches but {len(weights)} weights")
    ws = [float(w) for w in weights]
    if any(w < 0.0 for w in ws):
        raise ValueError(f"weights must be non-negative, got {ws}")
    total = sum(ws)
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"weights must sum to 1 within 1e-9, got {total!r}")
    _check_same_dims(*branches)
    if len(branches) == 1:
        return PixelGrid(branches[0].data)
    if len(branches) == 2:
        return fuse(branches[0], branches[1], FusionWeight(min(1.0, max(0.0, ws[1]))))
    acc = ws[0] * branches[0].data
    for w, branch in zip(ws[1:], branches[1:]):
        acc = acc + w * branch.data
    return PixelGrid(acc)


def optimal_alpha_mse(
    base: PixelGrid, strong: PixelGrid, truth: PixelGrid
) -> FusionWeight:
    """Closed-form minimizer of MSE(fuse(base, strong, a), truth) over a in [0, 1].

    MSE is quadratic in a with leading coefficient ||strong - base||^2 >= 0;
    the unconstrained minimizer <truth - base, strong - base> / ||strong - base||^2
    is clamped to [0, 1].
    """
    _check_same_dims(base, strong, truth)
    direction = strong.data - base.data
    denom = float(np.sum(direction * direction))
    if denom == 0.0:
        raise IdenticalBranchesError(
            "base and strong branches are identical; the optimal weight is undefined"
        )
    num = float(np.sum((truth.data - base.data) * direction))
    return FusionWeight(min(1.0, max(0.0, num / denom)))
