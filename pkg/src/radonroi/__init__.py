"""Radon-barcode tagging, retrieval, and click-guided ROI estimation."""

from .barcode import (
    RadonBarcode,
    generate_barcode,
    hamming,
    native_bin_count,
    radon_projections,
    radon_projections_raw,
    threshold_projection,
)
from .evaluation import (
    CaseResult,
    EvalReport,
    LabeledCase,
    LabeledDataset,
    generate_synthetic_dataset,
    leave_one_out,
    simulate_click,
)
from .image import hyperbolize, load_grayscale, resize, save_png, sticks_filter
from .index import (
    BarcodeConfig,
    BoundingBox,
    CaseRecord,
    IndexDatabase,
    bbox_from_mask,
    index_case,
    load_index,
    preprocess_image,
    save_index,
)
from .overlay import render_overlay
from .search import (
    Match,
    QueryResult,
    compute_weights,
    dice,
    estimate_bbox,
    query,
    query_bbox_from_click,
    rank_cases,
)

__version__ = "0.1.0"

__all__ = [
    "BarcodeConfig",
    "BoundingBox",
    "CaseRecord",
    "CaseResult",
    "EvalReport",
    "IndexDatabase",
    "LabeledCase",
    "LabeledDataset",
    "Match",
    "QueryResult",
    "RadonBarcode",
    "bbox_from_mask",
    "compute_weights",
    "dice",
    "estimate_bbox",
    "generate_barcode",
    "generate_synthetic_dataset",
    "hamming",
    "hyperbolize",
    "index_case",
    "leave_one_out",
    "load_grayscale",
    "load_index",
    "native_bin_count",
    "preprocess_image",
    "query",
    "query_bbox_from_click",
    "radon_projections",
    "radon_projections_raw",
    "rank_cases",
    "render_overlay",
    "resize",
    "save_index",
    "save_png",
    "simulate_click",
    "sticks_filter",
    "threshold_projection",
]
