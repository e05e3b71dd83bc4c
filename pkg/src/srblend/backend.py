"""Black-box SR backend abstraction.

A backend maps an LR grid to a grid exactly `scale` times larger. Two builtin
analytic kinds (nearest, bicubic) run in-process; the `external` kind drives
any model wrapped behind the subprocess protocol:

    <command...> --input-dir <D> --output-dir <E> --scale <s>

where D holds only 8-bit PNGs, the process must write a same-named PNG of
exactly s-times dimensions into E for every input, exit 0 on success, and
never modify D. Environment variables pass through unmodified. Images cross
the boundary as 8-bit PNG files, the way real challenge pipelines stitch
pretrained models together; the quantization at that boundary is accepted.
"""

from __future__ import annotations

import shutil
import subprocess
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import resample
from .grid import PixelGrid, load_image, save_image

KIND_NEAREST = "builtin-nearest"
KIND_BICUBIC = "builtin-bicubic"
KIND_EXTERNAL = "external"
KINDS = (KIND_NEAREST, KIND_BICUBIC, KIND_EXTERNAL)

DEFAULT_TIMEOUT_S = 600.0


class BackendError(Exception):
    """Base failure, always attributed to a backend id."""

    def __init__(self, backend_id: str, message: str, image_id: str | None = None):
        self.backend_id = backend_id
        self.image_id = image_id
        where = f"backend '{backend_id}'"
        if image_id is not None:
            where += f", image '{image_id}'"
        super().__init__(f"{where}: {message}")


class BackendExitError(BackendError):
    """Subprocess exited with a nonzero status."""


class BackendTimeoutError(BackendError):
    """Subprocess exceeded the per-invocation timeout."""


class BackendOutputError(BackendError):
    """Expected output file missing or unreadable."""


class BackendDimensionError(BackendError):
    """Output dimensions are not scale times the input."""


@dataclass(frozen=True)
class BackendSpec:
    """Identifier plus invocation recipe for a black-box SR function.

    `command` and `workdir` apply to external backends only. `scale` 1 is
    allowed (an identity backend is useful in tests) even though real SR
    runs use scale >= 2. Timeout is per batch invocation.
    """

    id: str
    kind: str
    scale: int
    command: tuple[str, ...] = ()
    workdir: Path | None = None
    deterministic: bool = True
    timeout_s: float = DEFAULT_TIMEOUT_S

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown backend kind '{self.kind}', expected one of {KINDS}")
        if int(self.scale) < 1:
            raise ValueError(f"scale must be >= 1, got {self.scale}")
        if self.kind == KIND_EXTERNAL and not self.command:
            raise ValueError("external backend requires a non-empty command")
        object.__setattr__(self, "command", tuple(str(c) for c in self.command))


def _nearest(grid: PixelGrid, scale: int) -> PixelGrid:
    arr = np.repeat(np.repeat(grid.data, scale, axis=0), scale, axis=1)
    return PixelGrid(arr)


def _check_dims(spec: BackendSpec, image_id: str, lr: PixelGrid, out: PixelGrid) -> PixelGrid:
    want = (lr.width * spec.scale, lr.height * spec.scale)
    got = (out.width, out.height)
    if want != got:
        raise BackendDimensionError(
            spec.id,
            f"expected {want[0]}x{want[1]}, got {got[0]}x{got[1]}",
            image_id=image_id,
        )
    return out


def run_backend(spec: BackendSpec, lr: PixelGrid) -> PixelGrid:
    """Run a single LR grid through the backend; output dims are validated."""
    return run_backend_batch(spec, [("input", lr)])[0][1]


def run_backend_batch(
    spec: BackendSpec, inputs: list[tuple[str, PixelGrid]]
) -> list[tuple[str, PixelGrid]]:
    """Run many (id, grid) pairs in one invocation; order-preserving.

    For external backends this is a single subprocess call over a directory
    of all inputs. Any missing or invalid output fails the whole batch with
    the offending id named.
    """
    ids = [i for i, _ in inputs]
    if len(set(ids)) != len(ids):
        raise ValueError("batch ids must be unique")
    if not inputs:
        return []
    if spec.kind == KIND_NEAREST:
        return [(i, _check_dims(spec, i, g, _nearest(g, spec.scale))) for i, g in inputs]
    if spec.kind == KIND_BICUBIC:
        return [
            (i, _check_dims(spec, i, g, resample.upscale(g, spec.scale)))
            for i, g in inputs
        ]
    return _run_external_batch(spec, inputs)


def _run_external_batch(spec, inputs):
    in_dir = Path(tempfile.mkdtemp(prefix=f"srblend-{spec.id}-in-"))
    out_dir = Path(tempfile.mkdtemp(prefix=f"srblend-{spec.id}-out-"))
    keep_note = f"(dirs retained for debugging: {in_dir}, {out_dir})"
    try:
        for image_id, lr in inputs:
            save_image(lr, in_dir / f"{image_id}.png")
        cmd = list(spec.command) + [
            "--input-dir", str(in_dir),
            "--output-dir", str(out_dir),
            "--scale", str(spec.scale),
        ]
        try:
            proc = subprocess.run(
                cmd,
                cwd=str(spec.workdir) if spec.workdir else None,
                timeout=spec.timeout_s,
                capture_output=True,
                text=True,
            )
        except subprocess.TimeoutExpired:
            raise BackendTimeoutError(
                spec.id, f"no result within {spec.timeout_s}s {keep_note}"
            )
        except FileNotFoundError as exc:
            raise BackendExitError(spec.id, f"command not found: {exc} {keep_note}")
        if proc.returncode != 0:
            tail = proc.stderr.strip().splitlines()[-5:]
            raise BackendExitError(
                spec.id,
                f"exit status {proc.returncode}; stderr tail: {tail} {keep_note}",
            )
        results = []
        for image_id, lr in inputs:
            out_path = out_dir / f"{image_id}.png"
            if not out_path.is_file():
                raise BackendOutputError(
                    spec.id, f"missing output file {out_path.name} {keep_note}",
                    image_id=image_id,
                )
            try:
                out = load_image(out_path)
            except Exception as exc:
                raise BackendOutputError(
                    spec.id, f"unreadable output {out_path.name}: {exc} {keep_note}",
                    image_id=image_id,
                )
            results.append((image_id, _check_dims(spec, image_id, lr, out)))
    except BaseException:
        # retain temp dirs for post-mortem
        raise
    else:
        shutil.rmtree(in_dir, ignore_errors=True)
        shutil.rmtree(out_dir, ignore_errors=True)
        return results
