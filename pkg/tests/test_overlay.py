import numpy as np
import pytest

from radonroi.index import BoundingBox
from radonroi.overlay import ESTIMATE_COLOR, GT_COLOR, render_overlay


def test_shape_and_base_pixels():
    img = np.full((20, 30), 80, dtype=np.uint8)
    out = render_overlay(img)
    assert out.shape == (20, 30, 3)
    assert (out == 80).all()


def test_gt_drawn_solid():
    img = np.zeros((20, 20), dtype=np.uint8)
    gt = BoundingBox(3, 4, 12, 15)
    out = render_overlay(img, gt=gt)
    top_edge = out[4, 3:13]
    assert (top_edge == GT_COLOR).all()
    left_edge = out[4:16, 3]
    assert (left_edge == GT_COLOR).all()


def test_estimate_drawn_dashed():
    img = np.zeros((40, 40), dtype=np.uint8)
    est = BoundingBox(2, 2, 37, 37)
    out = render_overlay(img, estimate=est)
    top_edge = out[2, 2:38]
    on = (top_edge == ESTIMATE_COLOR).all(axis=1)
    assert on.any() and not on.all()  # dashed: some painted, some gaps


def test_out_of_bounds_box_rejected():
    img = np.zeros((10, 10), dtype=np.uint8)
    with pytest.raises(ValueError):
        render_overlay(img, gt=BoundingBox(0, 0, 20, 20))
