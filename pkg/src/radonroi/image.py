"""Grayscale image loading, resizing, and enhancement.

Images are plain 2-D numpy arrays in (row, col) = (y, x) order. The
canonical form is ``uint8`` with intensities in [0, 255]; a real-valued
(float64) variant is accepted everywhere and used between filter stages.
All rounding back to integer gray levels is nearest-integer with ties
away from zero, clamped to [0, 255].
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

GRAY_LEVELS = 256

# Rec. 601 luma weights used for color-to-grayscale conversion.
_LUMA_R, _LUMA_G, _LUMA_B = 0.299, 0.587, 0.114

_SUPPORTED_FORMATS = {"PNG", "PPM"}  # Pillow reports PGM under the PPM codec


def round_half_away(values):
    """Round to nearest integer, ties away from zero.

    Works on scalars and arrays; returns float values (cast at call site).
    """
    v = np.asarray(values, dtype=np.float64)
    out = np.where(v >= 0.0, np.floor(v + 0.5), np.ceil(v - 0.5))
    if np.isscalar(values) or np.ndim(values) == 0:
        return float(out)
    return out


def _to_uint8(values: np.ndarray) -> np.ndarray:
    return np.clip(round_half_away(values), 0, GRAY_LEVELS - 1).astype(np.uint8)


def as_gray_array(img) -> np.ndarray:
    """Validate and return an image as a 2-D array without copying when possible."""
    a = np.asarray(img)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"expected a 2-D image with positive dims, got shape {a.shape}")
    return a


def load_grayscale(path) -> np.ndarray:
    """Load a PNG or binary PGM file as a uint8 grayscale image.

    Color inputs are converted with the Rec. 601 luma weights
    (0.299 R + 0.587 G + 0.114 B), rounded.

    Raises:
        FileNotFoundError: path does not exist.
        ValueError: file cannot be decoded, or is an unsupported format/depth.
    """
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"image file not found: {p}")
    try:
        with Image.open(p) as im:
            im.load()
            fmt = im.format
            if fmt not in _SUPPORTED_FORMATS:
                raise ValueError(f"unsupported image format {fmt!r} in {p} (expected PNG or PGM)")
            if im.mode == "L":
                return np.asarray(im, dtype=np.uint8)
            if im.mode == "1":
                return np.asarray(im.convert("L"), dtype=np.uint8)
            if im.mode in ("RGB", "RGBA", "P", "LA"):
                rgb = np.asarray(im.convert("RGB"), dtype=np.float64)
                luma = _LUMA_R * rgb[..., 0] + _LUMA_G * rgb[..., 1] + _LUMA_B * rgb[..., 2]
                return _to_uint8(luma)
            raise ValueError(f"unsupported pixel mode {im.mode!r} in {p} (8-bit gray or color only)")
    except (UnidentifiedImageError, OSError) as exc:
        raise ValueError(f"cannot decode image file {p}: {exc}") from exc


def save_png(img: np.ndarray, path) -> None:
    """Write a uint8 grayscale or RGB array as a PNG file."""
    a = np.asarray(img)
    if a.dtype != np.uint8:
        a = _to_uint8(a)
    Image.fromarray(a).save(Path(path), format="PNG")


def _sample_grid(n_out: int, n_in: int) -> np.ndarray:
    # Align-corners convention: output endpoints sample input endpoints
    # exactly, so equal dims is the identity map.
    if n_out == 1:
        return np.array([(n_in - 1) / 2.0])
    return np.linspace(0.0, n_in - 1.0, n_out)


def resize(img, width: int, height: int) -> np.ndarray:
    """Bilinear resize to ``height`` x ``width``.

    uint8 input yields rounded uint8 output; float input stays float
    (no rounding), which keeps the operation linear in the intensities.
    """
    a = as_gray_array(img)
    if width < 1 or height < 1:
        raise ValueError(f"target dimensions must be >= 1, got {width}x{height}")
    rows, cols = a.shape
    src = a.astype(np.float64)

    xs = _sample_grid(width, cols)
    ys = _sample_grid(height, rows)
    if cols > 1:
        x0 = np.clip(np.floor(xs).astype(np.intp), 0, cols - 2)
        fx = xs - x0
        x1 = x0 + 1
    else:
        x0 = x1 = np.zeros(width, dtype=np.intp)
        fx = np.zeros(width)
    if rows > 1:
        y0 = np.clip(np.floor(ys).astype(np.intp), 0, rows - 2)
        fy = ys - y0
        y1 = y0 + 1
    else:
        y0 = y1 = np.zeros(height, dtype=np.intp)
        fy = np.zeros(height)

    wx = fx[np.newaxis, :]
    wy = fy[:, np.newaxis]
    top = (1.0 - wx) * src[np.ix_(y0, x0)] + wx * src[np.ix_(y0, x1)]
    bot = (1.0 - wx) * src[np.ix_(y1, x0)] + wx * src[np.ix_(y1, x1)]
    out = (1.0 - wy) * top + wy * bot

    if np.issubdtype(a.dtype, np.integer) or a.dtype == np.bool_:
        return _to_uint8(out)
    return out


def hyperbolize(img, beta: float = 1.5) -> np.ndarray:
    """Fuzzy hyperbolization contrast enhancement.

    Gray levels are mapped through
    ``g' = (L-1)/(exp(-1)-1) * (exp(-mu(g)**beta) - 1)`` with the linear
    min-max membership ``mu(g) = (g - g_min)/(g_max - g_min)``, so the
    image minimum maps to 0 and the maximum to 255. ``beta > 1`` darkens
    mid tones. A constant image has no defined membership and is
    returned unchanged.
    """
    a = as_gray_array(img)
    if beta <= 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    src = a.astype(np.float64)
    g_min = src.min()
    g_max = src.max()
    if g_max == g_min:
        return a.astype(np.uint8) if not np.issubdtype(a.dtype, np.floating) else _to_uint8(src)
    mu = (src - g_min) / (g_max - g_min)
    scale = (GRAY_LEVELS - 1) / (math.exp(-1.0) - 1.0)
    out = scale * (np.exp(-np.power(mu, beta)) - 1.0)
    return _to_uint8(out)


def stick_offsets(length: int) -> list[tuple[tuple[int, int], ...]]:
    """Pixel offsets of the 2n-2 oriented sticks of odd ``length`` n.

    Each stick is a digital line of n pixels through the centre of an
    n x n window, one pixel per row (near-vertical family) or per column
    (near-horizontal family); the two diagonals are shared between the
    families and deduplicated.
    """
    n = length
    if n < 3 or n % 2 == 0:
        raise ValueError(f"stick length must be odd and >= 3, got {n}")
    half = (n - 1) // 2
    sticks: list[tuple[tuple[int, int], ...]] = []
    seen: set[frozenset[tuple[int, int]]] = set()

    def add(offsets):
        key = frozenset(offsets)
        if key not in seen:
            seen.add(key)
            sticks.append(tuple(offsets))

    for i in range(n):
        span = n - 1 - 2 * i
        # top edge (0, i) to bottom edge (n-1, n-1-i), one sample per row
        add(
            tuple((r - half, int(math.floor(i + span * r / (n - 1) + 0.5)) - half) for r in range(n))
        )
    for i in range(n):
        span = n - 1 - 2 * i
        # left edge (i, 0) to right edge (n-1-i, n-1), one sample per column
        add(
            tuple((int(math.floor(i + span * c / (n - 1) + 0.5)) - half, c - half) for c in range(n))
        )
    return sticks


def sticks_filter(img, stick_length: int = 5) -> np.ndarray:
    """Sticks speckle filter: max of mean intensities along oriented sticks.

    For every pixel the mean intensity along each of the 2n-2 sticks
    (length n, thickness 1, centred on the pixel) is computed and the
    maximum of those means is output, rounded. Border pixels average
    only the in-bounds samples of each stick.
    """
    a = as_gray_array(img)
    n = stick_length
    rows, cols = a.shape
    if n % 2 == 0 or n < 3:
        raise ValueError(f"stick length must be odd and >= 3, got {n}")
    if n > min(rows, cols):
        raise ValueError(f"stick length {n} exceeds smallest image dimension {min(rows, cols)}")

    src = a.astype(np.float64)
    best: np.ndarray | None = None
    for offsets in stick_offsets(n):
        acc = np.zeros_like(src)
        cnt = np.zeros_like(src)
        for dr, dc in offsets:
            r0, r1 = max(0, -dr), rows - max(0, dr)
            c0, c1 = max(0, -dc), cols - max(0, dc)
            acc[r0:r1, c0:c1] += src[r0 + dr:r1 + dr, c0 + dc:c1 + dc]
            cnt[r0:r1, c0:c1] += 1.0
        mean = acc / cnt
        best = mean if best is None else np.maximum(best, mean)
    return _to_uint8(best)
