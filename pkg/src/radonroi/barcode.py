"""Radon projections and bit-packed Radon barcodes.

A barcode is built by projecting the image along a half-open fan of
angles theta_k = k * 180/A (k = 0..A-1), thresholding each projection at
the median of its strictly positive values, and concatenating the per-angle
bit fragments angle-major. Barcodes of equal configuration are compared
by Hamming distance over 64-bit packed words.
"""

from __future__ import annotations

import math

import numpy as np

from .image import as_gray_array, resize


def native_bin_count(rows: int, cols: int) -> int:
    """Number of offset bins used before resampling: one per pixel-unit step
    across the full diagonal extent, symmetric about the centre."""
    d_max = math.hypot((cols - 1) / 2.0, (rows - 1) / 2.0)
    return 2 * math.ceil(d_max) + 1


def radon_projections_raw(img, num_angles: int) -> np.ndarray:
    """Discrete Radon projections by pixel-driven nearest-bin accumulation.

    For each angle, every pixel (x, y) with intensity v adds v to the bin
    whose centre is nearest to rho = x*cos(theta) + y*sin(theta), with
    (x, y) taken relative to the image centre. Bin centres sample
    [-d_max, +d_max] uniformly where d_max is the half diagonal, so each
    angle's bins sum exactly to the total image intensity.

    Returns an ``(num_angles, native_bin_count)`` float64 matrix.
    """
    a = as_gray_array(img).astype(np.float64)
    if num_angles < 1:
        raise ValueError(f"num_angles must be >= 1, got {num_angles}")
    rows, cols = a.shape
    cy = (rows - 1) / 2.0
    cx = (cols - 1) / 2.0
    d_max = math.hypot(cx, cy)
    nbins = 2 * math.ceil(d_max) + 1

    flat = a.ravel()
    if nbins == 1:
        return np.full((num_angles, 1), flat.sum())

    x = np.arange(cols, dtype=np.float64) - cx
    y = np.arange(rows, dtype=np.float64) - cy
    xg = np.broadcast_to(x, (rows, cols)).ravel()
    yg = np.repeat(y, cols)
    step = 2.0 * d_max / (nbins - 1)

    out = np.empty((num_angles, nbins))
    for k in range(num_angles):
        theta = math.pi * k / num_angles
        rho = xg * math.cos(theta) + yg * math.sin(theta)
        idx = np.floor((rho + d_max) / step + 0.5).astype(np.intp)
        np.clip(idx, 0, nbins - 1, out=idx)
        out[k] = np.bincount(idx, weights=flat, minlength=nbins)
    return out


def _resample_row(row: np.ndarray, bins: int) -> np.ndarray:
    n = row.size
    if n == bins:
        return row.copy()
    if n == 1:
        return np.full(bins, row[0])
    positions = np.linspace(0.0, n - 1.0, bins)
    return np.interp(positions, np.arange(n, dtype=np.float64), row)


def radon_projections(img, num_angles: int, bins: int) -> np.ndarray:
    """Radon projections resampled to exactly ``bins`` values per angle.

    The native nearest-bin accumulation (see ``radon_projections_raw``)
    is linearly interpolated down (or up) to the requested bin count.
    """
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    raw = radon_projections_raw(img, num_angles)
    out = np.empty((num_angles, bins))
    for k in range(num_angles):
        out[k] = _resample_row(raw[k], bins)
    return out


def threshold_projection(row) -> np.ndarray:
    """Binarize one projection at the median of its strictly positive values.

    bit_j = 1 iff row_j >= median(positive entries); an all-zero row
    yields all-zero bits (the median of no values is undefined).
    """
    r = np.asarray(row, dtype=np.float64)
    if r.ndim != 1:
        raise ValueError(f"expected a 1-D projection row, got shape {r.shape}")
    positive = r[r > 0.0]
    if positive.size == 0:
        return np.zeros(r.size, dtype=np.uint8)
    t = np.median(positive)
    return (r >= t).astype(np.uint8)


class RadonBarcode:
    """Fixed-length bit string from thresholded Radon projections.

    Bits are ordered angle-major (all bins of angle 0, then angle 1, ...)
    and stored packed into little-endian 64-bit words.
    """

    __slots__ = ("num_angles", "bins_per_angle", "_words")

    def __init__(self, bits, num_angles: int, bins_per_angle: int):
        b = np.asarray(bits, dtype=np.uint8).ravel()
        expected = num_angles * bins_per_angle
        if b.size != expected:
            raise ValueError(
                f"bit length {b.size} does not match {num_angles} angles x {bins_per_angle} bins"
            )
        self.num_angles = int(num_angles)
        self.bins_per_angle = int(bins_per_angle)
        n_words = max(1, (expected + 63) // 64)
        packed = np.packbits(b, bitorder="little")
        padded = np.zeros(n_words * 8, dtype=np.uint8)
        padded[: packed.size] = packed
        self._words = padded.view(np.dtype("<u8"))

    def __len__(self) -> int:
        return self.num_angles * self.bins_per_angle

    def __eq__(self, other) -> bool:
        if not isinstance(other, RadonBarcode):
            return NotImplemented
        return (
            self.num_angles == other.num_angles
            and self.bins_per_angle == other.bins_per_angle
            and bool(np.array_equal(self._words, other._words))
        )

    def __hash__(self) -> int:
        return hash((self.num_angles, self.bins_per_angle, self._words.tobytes()))

    def __repr__(self) -> str:
        return f"RadonBarcode(angles={self.num_angles}, bins={self.bins_per_angle})"

    def bits(self) -> np.ndarray:
        """Unpacked bit values as a uint8 array of length angles x bins."""
        raw = np.unpackbits(self._words.view(np.uint8), bitorder="little")
        return raw[: len(self)]

    def to01(self) -> str:
        """Angle-major '0'/'1' text form (the persisted representation)."""
        return "".join("1" if b else "0" for b in self.bits())

    @classmethod
    def from01(cls, text: str, num_angles: int, bins_per_angle: int) -> "RadonBarcode":
        if set(text) - {"0", "1"}:
            raise ValueError("barcode text may contain only '0' and '1'")
        bits = np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0")
        return cls(bits, num_angles, bins_per_angle)


def generate_barcode(img, resize_to: int, num_angles: int) -> RadonBarcode:
    """Resize to ``resize_to`` square, project at ``num_angles`` angles with
    one bin per output pixel column, threshold each angle, and concatenate.

    Bit length is always ``num_angles * resize_to``.
    """
    if resize_to < 2:
        raise ValueError(f"resize_to must be >= 2, got {resize_to}")
    square = resize(img, resize_to, resize_to)
    projections = radon_projections(square, num_angles, resize_to)
    fragments = [threshold_projection(projections[k]) for k in range(num_angles)]
    return RadonBarcode(np.concatenate(fragments), num_angles, resize_to)


def hamming(a: RadonBarcode, b: RadonBarcode) -> int:
    """Number of differing bits between two barcodes of identical shape."""
    if a.num_angles != b.num_angles or a.bins_per_angle != b.bins_per_angle:
        raise ValueError(
            f"barcode shape mismatch: {a.num_angles}x{a.bins_per_angle} vs "
            f"{b.num_angles}x{b.bins_per_angle}"
        )
    return int(np.bitwise_count(a._words ^ b._words).sum())
