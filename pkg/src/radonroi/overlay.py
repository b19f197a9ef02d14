"""Box overlay rendering: ground truth solid, estimate dashed."""

from __future__ import annotations

import numpy as np

from .image import as_gray_array
from .index import BoundingBox

GT_COLOR = (40, 200, 40)
ESTIMATE_COLOR = (230, 50, 50)
QUERY_BOX_COLOR = (70, 130, 230)

_DASH = 4  # on/off run length in pixels for dashed edges


def _edge_coords(box: BoundingBox):
    xs = np.arange(box.x_s, box.x_e + 1)
    ys = np.arange(box.y_s, box.y_e + 1)
    top = (np.full_like(xs, box.y_s), xs)
    bottom = (np.full_like(xs, box.y_e), xs)
    left = (ys, np.full_like(ys, box.x_s))
    right = (ys, np.full_like(ys, box.x_e))
    return [top, bottom, left, right]


def _draw_box(canvas: np.ndarray, box: BoundingBox, color, dashed: bool) -> None:
    for rr, cc in _edge_coords(box):
        if dashed:
            run = np.arange(rr.size)
            keep = (run // _DASH) % 2 == 0
            rr, cc = rr[keep], cc[keep]
        canvas[rr, cc] = color


def render_overlay(
    img,
    gt: BoundingBox | None = None,
    estimate: BoundingBox | None = None,
    query_box: BoundingBox | None = None,
) -> np.ndarray:
    """Grayscale image as RGB with the requested boxes drawn on top.

    Ground truth is drawn solid, the estimate dashed, and the click box
    (when given) dashed in a third color.
    """
    a = as_gray_array(img)
    if a.dtype != np.uint8:
        a = np.clip(a, 0, 255).astype(np.uint8)
    canvas = np.stack([a, a, a], axis=-1)
    rows, cols = a.shape
    for box in (gt, estimate, query_box):
        if box is not None:
            box.validate_for(rows, cols)
    if query_box is not None:
        _draw_box(canvas, query_box, QUERY_BOX_COLOR, dashed=True)
    if gt is not None:
        _draw_box(canvas, gt, GT_COLOR, dashed=False)
    if estimate is not None:
        _draw_box(canvas, estimate, ESTIMATE_COLOR, dashed=True)
    return canvas
