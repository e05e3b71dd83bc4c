"""Training-free super-resolution ensembling toolkit.

Building blocks for squeezing extra quality out of frozen, black-box SR
models at test time: a geometric (dihedral) self-ensemble, overlap-tile
orchestration with feathered stitching, convex output-space fusion of a
stable base branch with a detail-oriented strong branch, PSNR/SSIM
evaluation with pinned conventions, and weight sweeps for picking the
operating point.
"""

from .backend import (
    KINDS,
    BackendDimensionError,
    BackendError,
    BackendExitError,
    BackendOutputError,
    BackendSpec,
    BackendTimeoutError,
    run_backend,
    run_backend_batch,
)
from .d4 import K, TRANSFORM_IDS, apply_transform, inverse_of, self_ensemble, self_ensemble_batch
from .dataset import (
    DatasetManifest,
    ManifestEntry,
    degrade_dataset,
    discover_pairs,
    load_manifest,
    save_manifest,
)
from .fusion import (
    FusionWeight,
    IdenticalBranchesError,
    fuse,
    fuse_many,
    optimal_alpha_mse,
)
from .grid import (
    CorruptImageError,
    PixelGrid,
    UnsupportedImageError,
    crop_border,
    load_image,
    quantize,
    save_image,
    to_bytes,
    to_luma,
)
from .metrics import (
    INF_PSNR,
    MODE_RGB,
    MODE_Y,
    ImageScore,
    MetricConfig,
    MetricReport,
    evaluate_pairs,
    psnr,
    ssim,
)
from .pipeline import (
    PipelineConfig,
    PipelineError,
    TilingParams,
    load_pipeline_config,
    run_branch,
    run_pipeline,
)
from .resample import cubic_kernel, downscale, upscale
from .sweep import (
    ComparisonRow,
    SweepCurve,
    SweepSample,
    alpha_grid,
    best_operating_point,
    comparison_table,
    emit_curve,
    format_comparison_table,
    load_curve_csv,
    render_curve_svg,
    sweep,
)
from .tiler import TileLayout, feather_field, split, stitch, tile_offsets, tiled_run

__version__ = "0.1.0"

__all__ = [
    "BackendDimensionError",
    "BackendError",
    "BackendExitError",
    "BackendOutputError",
    "BackendSpec",
    "BackendTimeoutError",
    "ComparisonRow",
    "CorruptImageError",
    "DatasetManifest",
    "FusionWeight",
    "INF_PSNR",
    "IdenticalBranchesError",
    "ImageScore",
    "K",
    "KINDS",
    "MODE_RGB",
    "MODE_Y",
    "ManifestEntry",
    "MetricConfig",
    "MetricReport",
    "PipelineConfig",
    "PipelineError",
    "PixelGrid",
    "SweepCurve",
    "SweepSample",
    "TRANSFORM_IDS",
    "TileLayout",
    "TilingParams",
    "UnsupportedImageError",
    "alpha_grid",
    "apply_transform",
    "best_operating_point",
    "comparison_table",
    "crop_border",
    "cubic_kernel",
    "degrade_dataset",
    "discover_pairs",
    "downscale",
    "emit_curve",
    "evaluate_pairs",
    "feather_field",
    "format_comparison_table",
    "fuse",
    "fuse_many",
    "inverse_of",
    "load_curve_csv",
    "load_image",
    "load_manifest",
    "load_pipeline_config",
    "optimal_alpha_mse",
    "psnr",
    "quantize",
    "render_curve_svg",
    "run_backend",
    "run_backend_batch",
    "run_branch",
    "run_pipeline",
    "save_image",
    "save_manifest",
    "self_ensemble",
    "self_ensemble_batch",
    "split",
    "ssim",
    "stitch",
    "sweep",
    "tile_offsets",
    "tiled_run",
    "to_bytes",
    "to_luma",
    "upscale",
]
