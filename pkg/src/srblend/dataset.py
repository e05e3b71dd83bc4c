"""HR/LR dataset pairing and bicubic degradation.

Filename convention: HR images are `<id>.png`, LR images are
`<id>x<scale>.png`, matched by id. Manifests serialize as plain text —
one `id<TAB>hr-path<TAB>lr-path` line per entry, sorted by id, UTF-8, LF —
so a dataset can be assembled once and reused across runs.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

from PIL import Image

from . import resample
from .grid import PixelGrid, load_image, save_image


@dataclass(frozen=True)
class ManifestEntry:
    image_id: str
    hr_path: Path
    lr_path: Path


@dataclass(frozen=True)
class DatasetManifest:
    """Sorted, uniquely-id'd HR/LR pairs at one scale factor."""

    entries: tuple[ManifestEntry, ...]
    scale: int
    source_note: str = ""

    def __post_init__(self):
        ids = [e.image_id for e in self.entries]
        if len(set(ids)) != len(ids):
            raise ValueError("manifest ids must be unique")
        if ids != sorted(ids):
            raise ValueError("manifest entries must be sorted by id")
        if int(self.scale) < 1:
            raise ValueError(f"scale must be >= 1, got {self.scale}")

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(e.image_id for e in self.entries)


def _image_size(path: Path) -> tuple[int, int]:
    """(width, height) from the PNG header, without decoding pixel data."""
    with Image.open(path) as im:
        return im.size


def _check_pair_dims(entries: list[ManifestEntry], scale: int) -> None:
    bad = []
    for e in entries:
        hw, hh = _image_size(e.hr_path)
        lw, lh = _image_size(e.lr_path)
        if (lw * scale, lh * scale) != (hw, hh):
            bad.append(f"{e.image_id}: HR {hw}x{hh} vs LR {lw}x{lh} at scale {scale}")
    if bad:
        raise ValueError("dimension mismatch in pairs:\n  " + "\n  ".join(bad))


def discover_pairs(hr_dir, lr_dir, scale: int) -> DatasetManifest:
    """Pair `<id>.png` HR files with `<id>x<scale>.png` LR files.

    Any unmatched file on either side aborts with the full list; every pair's
    dimensions are validated against the scale factor before the manifest is
    returned.
    """
    hr_dir = Path(hr_dir)
    lr_dir = Path(lr_dir)
    scale = int(scale)
    for d in (hr_dir, lr_dir):
        if not d.is_dir():
            raise FileNotFoundError(f"directory not found: {d}")
    suffix = f"x{scale}"
    hr_files = {p.stem: p for p in hr_dir.glob("*.png")}
    lr_files = {
        p.stem[: -len(suffix)]: p
        for p in lr_dir.glob("*.png")
        if p.stem.endswith(suffix)
    }
    unmatched_hr = sorted(set(hr_files) - set(lr_files))
    unmatched_lr = sorted(set(lr_files) - set(hr_files))
    if unmatched_hr or unmatched_lr:
        raise ValueError(
            f"unpaired files between {hr_dir} and {lr_dir}: "
            f"HR without LR {unmatched_hr}, LR without HR {unmatched_lr}"
        )
    if not hr_files:
        warnings.warn(f"no image pairs found under {hr_dir} and {lr_dir}")
    entries = [
        ManifestEntry(image_id, hr_files[image_id], lr_files[image_id])
        for image_id in sorted(hr_files)
    ]
    _check_pair_dims(entries, scale)
    return DatasetManifest(
        tuple(entries), scale, source_note=f"discovered x{scale} pairs"
    )


def degrade_dataset(hr_dir, out_lr_dir, scale: int, pre_crop: bool = False) -> DatasetManifest:
    """Generate `<id>x<scale>.png` LR images by antialiased bicubic downscale.

    HR dimensions must be divisible by the scale; with pre_crop, offending
    images are cropped at the bottom/right to the nearest multiple and the
    cropped HR copy (saved under `<out_lr_dir>/hr-cropped/`) becomes the
    pair's ground truth.
    """
    hr_dir = Path(hr_dir)
    out_lr_dir = Path(out_lr_dir)
    scale = int(scale)
    if not hr_dir.is_dir():
        raise FileNotFoundError(f"directory not found: {hr_dir}")
    out_lr_dir.mkdir(parents=True, exist_ok=True)
    hr_paths = sorted(hr_dir.glob("*.png"), key=lambda p: p.stem)
    if not hr_paths:
        warnings.warn(f"no HR images found under {hr_dir}")
    cropped_dir = out_lr_dir / "hr-cropped"
    entries = []
    for path in hr_paths:
        image_id = path.stem
        hr = load_image(path)
        hr_path = path
        if hr.height % scale or hr.width % scale:
            if not pre_crop:
                raise ValueError(
                    f"'{image_id}' is {hr.width}x{hr.height}, not divisible by "
                    f"{scale}; enable pre_crop to crop to a multiple"
                )
            hr = PixelGrid(
                hr.data[: hr.height - hr.height % scale, : hr.width - hr.width % scale, :]
            )
            cropped_dir.mkdir(exist_ok=True)
            hr_path = cropped_dir / path.name
            save_image(hr, hr_path)
        lr = resample.downscale(hr, scale)
        lr_path = out_lr_dir / f"{image_id}x{scale}.png"
        save_image(lr, lr_path)
        entries.append(ManifestEntry(image_id, hr_path, lr_path))
    return DatasetManifest(
        tuple(entries), scale, source_note=f"bicubic x{scale} degradation"
    )


def save_manifest(manifest: DatasetManifest, path) -> None:
    """One `id<TAB>hr-path<TAB>lr-path` line per entry, LF endings, UTF-8."""
    lines = [f"{e.image_id}\t{e.hr_path}\t{e.lr_path}" for e in manifest.entries]
    text = "\n".join(lines) + ("\n" if lines else "")
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def load_manifest(path, scale: int, validate_dims: bool = True) -> DatasetManifest:
    """Parse a manifest file; by default re-validate every pair's dimensions."""
    path = Path(path)
    entries = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ValueError(f"{path}:{lineno}: expected 3 tab-separated fields")
        image_id, hr_path, lr_path = fields
        entries.append(ManifestEntry(image_id, Path(hr_path), Path(lr_path)))
    manifest = DatasetManifest(tuple(entries), int(scale), source_note=f"loaded from {path.name}")
    missing = [str(p) for e in manifest.entries for p in (e.hr_path, e.lr_path) if not p.is_file()]
    if missing:
        raise FileNotFoundError(f"manifest references missing files: {missing}")
    if validate_dims:
        _check_pair_dims(list(manifest.entries), manifest.scale)
    return manifest
