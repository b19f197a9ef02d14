"""Query path: click box, Hamming ranking, weighted box estimation, Dice.

A query image is preprocessed like the indexed cases, tagged with a
global barcode and a barcode of the fixed-size box around the user's
click, and matched against every indexed case by summed Hamming
distance. The top matches' boxes are averaged (weighted by similarity,
in resolution-normalized coordinates) into the estimated box.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .barcode import RadonBarcode, generate_barcode, hamming
from .image import as_gray_array, round_half_away
from .index import BoundingBox, CaseRecord, IndexDatabase, preprocess_image


@dataclass(frozen=True)
class Match:
    case_id: str
    d_total: int | float
    weight: float


@dataclass(frozen=True)
class QueryResult:
    """Estimated box plus the ranked matches that produced it."""

    estimated_bbox: BoundingBox
    query_bbox: BoundingBox
    matches: tuple[Match, ...]

    def to_dict(self) -> dict:
        return {
            "estimated_bbox": self.estimated_bbox.as_list(),
            "query_bbox": self.query_bbox.as_list(),
            "matches": [
                {
                    "case_id": m.case_id,
                    "d_total": m.d_total,
                    "weight": round(m.weight, 9),
                }
                for m in self.matches
            ],
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def query_bbox_from_click(center, dims, delta: float) -> BoundingBox:
    """Fixed-size box of half-width delta*C and half-height delta*R centred
    on the click, clamped at the image borders."""
    x_c, y_c = center
    rows, cols = dims
    if not (0 <= x_c <= cols - 1 and 0 <= y_c <= rows - 1):
        raise ValueError(
            f"click ({x_c}, {y_c}) outside image bounds x in [0, {cols - 1}], y in [0, {rows - 1}]"
        )
    dx = delta * cols
    dy = delta * rows
    x_s = max(0, int(round_half_away(x_c - dx)))
    y_s = max(0, int(round_half_away(y_c - dy)))
    x_e = min(cols - 1, int(round_half_away(x_c + dx)))
    y_e = min(rows - 1, int(round_half_away(y_c + dy)))
    return BoundingBox(x_s, y_s, x_e, y_e)


def rank_cases(
    db: IndexDatabase, query_global: RadonBarcode, query_roi: RadonBarcode
) -> list[tuple[str, int | float]]:
    """All cases ranked by d_total = d_H(global) + d_H(ROI), ascending,
    ties broken by case id so the order is a total order."""
    if len(db) == 0:
        raise ValueError("cannot rank against an empty index")
    cfg = db.config
    if (query_global.num_angles, query_global.bins_per_angle) != (cfg.global_angles, cfg.global_side):
        raise ValueError("query global barcode shape does not match index config")
    if (query_roi.num_angles, query_roi.bins_per_angle) != (cfg.roi_angles, cfg.roi_side):
        raise ValueError("query ROI barcode shape does not match index config")
    scored: list[tuple[str, int | float]] = []
    for case in db.cases:
        d_global = hamming(case.global_code, query_global)
        d_roi = hamming(case.roi_code, query_roi)
        if cfg.normalize_distances:
            d_total: int | float = d_global / cfg.global_bits + d_roi / cfg.roi_bits
        else:
            d_total = d_global + d_roi
        scored.append((case.case_id, d_total))
    scored.sort(key=lambda item: (item[1], item[0]))
    return scored


def compute_weights(distances) -> np.ndarray:
    """Similarity weights w_i = 1 - v_i / max(v), uniform fallback.

    When every distance is equal (including the single-match and all-zero
    cases) the formula would zero every weight and break the weighted
    average, so uniform weights of 1 are returned instead.
    """
    v = np.asarray(distances, dtype=np.float64)
    if v.ndim != 1 or v.size < 1:
        raise ValueError("distances must be a non-empty 1-D sequence")
    if np.any(v < 0):
        raise ValueError("distances must be nonnegative")
    v_max = v.max()
    if v_max == 0.0 or np.all(v == v_max):
        return np.ones_like(v)
    return 1.0 - v / v_max


def normalized_box(bbox: BoundingBox, height: int, width: int) -> np.ndarray:
    """Box coordinates as fractions of the owning image's coordinate range."""
    sx = float(width - 1) if width > 1 else 1.0
    sy = float(height - 1) if height > 1 else 1.0
    return np.array([bbox.x_s / sx, bbox.y_s / sy, bbox.x_e / sx, bbox.y_e / sy])


def weighted_box_average(norm_boxes, weights) -> np.ndarray:
    """Per-coordinate weighted mean of normalized boxes (pre-rounding).

    Each output coordinate is a convex combination of the inputs, so it
    lies within their [min, max] envelope.
    """
    boxes = np.atleast_2d(np.asarray(norm_boxes, dtype=np.float64))
    w = np.asarray(weights, dtype=np.float64)
    if boxes.shape[0] != w.size:
        raise ValueError(f"{boxes.shape[0]} boxes but {w.size} weights")
    total = w.sum()
    if total <= 0:
        raise ValueError("weight sum must be positive")
    return (boxes * w[:, np.newaxis]).sum(axis=0) / total


def estimate_bbox(cases, weights, query_dims) -> BoundingBox:
    """Weighted average of the matched cases' boxes, mapped into the query
    image frame.

    Boxes are first normalized by their own image's coordinate range so
    differently sized training images average consistently, then the mean
    is scaled to the query dims, rounded, and clamped.
    """
    cases = list(cases)
    if not cases:
        raise ValueError("cannot estimate a box from an empty match list")
    rows, cols = query_dims
    norm = np.stack([normalized_box(c.bbox, c.height, c.width) for c in cases])
    mean = weighted_box_average(norm, weights)
    sx = float(cols - 1) if cols > 1 else 0.0
    sy = float(rows - 1) if rows > 1 else 0.0
    coords = round_half_away(mean * np.array([sx, sy, sx, sy]))
    x_s, y_s, x_e, y_e = (int(c) for c in coords)
    x_s, x_e = sorted((max(0, min(cols - 1, x_s)), max(0, min(cols - 1, x_e))))
    y_s, y_e = sorted((max(0, min(rows - 1, y_s)), max(0, min(rows - 1, y_e))))
    return BoundingBox(x_s, y_s, x_e, y_e)


def dice(a: BoundingBox, b: BoundingBox) -> float:
    """Dice overlap 2|A n B| / (|A| + |B|) over inclusive pixel counts."""
    ix_s = max(a.x_s, b.x_s)
    iy_s = max(a.y_s, b.y_s)
    ix_e = min(a.x_e, b.x_e)
    iy_e = min(a.y_e, b.y_e)
    if ix_s > ix_e or iy_s > iy_e:
        return 0.0
    inter = (ix_e - ix_s + 1) * (iy_e - iy_s + 1)
    return 2.0 * inter / (a.area() + b.area())


def query_preprocessed(
    db: IndexDatabase, pre_img: np.ndarray, click, top_m: int | None = None
) -> QueryResult:
    """Query with an image that has already been through the preprocessing
    chain (used when the caller preprocesses once and queries many times)."""
    if len(db) == 0:
        raise ValueError("cannot query an empty index")
    cfg = db.config
    a = as_gray_array(pre_img)
    rows, cols = a.shape
    qbox = query_bbox_from_click(click, (rows, cols), cfg.delta)
    query_global = generate_barcode(a, cfg.global_side, cfg.global_angles)
    query_roi = generate_barcode(qbox.crop(a), cfg.roi_side, cfg.roi_angles)
    ranked = rank_cases(db, query_global, query_roi)
    m = min(top_m if top_m is not None else cfg.top_m, len(ranked))
    if m < 1:
        raise ValueError(f"top_m must be >= 1, got {top_m}")
    top = ranked[:m]
    weights = compute_weights([d for _, d in top])
    records = [db.case_by_id(cid) for cid, _ in top]
    estimated = estimate_bbox(records, weights, (rows, cols))
    matches = tuple(
        Match(cid, d, float(w)) for (cid, d), w in zip(top, weights)
    )
    return QueryResult(estimated_bbox=estimated, query_bbox=qbox, matches=matches)


def query(db: IndexDatabase, img, click, top_m: int | None = None) -> QueryResult:
    """End-to-end click query against an index.

    Preprocesses the image with the index's own configuration, builds the
    two query barcodes (full image and click box crop), ranks every case,
    and averages the top matches' boxes into the estimated box.
    """
    pre = preprocess_image(img, db.config)
    return query_preprocessed(db, pre, click, top_m=top_m)
