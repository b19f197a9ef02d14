"""Indexed case database: bounding boxes plus global and ROI barcodes.

Each indexed image carries the tight box around its marked lesion, a
barcode of the whole (preprocessed) image, and a barcode of the box
crop. The database persists as a single versioned JSON document with
barcodes in '0'/'1' text form, so an index file is human-inspectable
and round-trips bit-exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .barcode import RadonBarcode, generate_barcode
from .image import as_gray_array, hyperbolize, sticks_filter

FORMAT_VERSION = 1


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box, 0-based pixel coordinates, inclusive on both ends."""

    x_s: int
    y_s: int
    x_e: int
    y_e: int

    def __post_init__(self):
        if not (0 <= self.x_s <= self.x_e and 0 <= self.y_s <= self.y_e):
            raise ValueError(f"invalid bounding box {self.as_list()}")

    def validate_for(self, height: int, width: int) -> None:
        if self.x_e > width - 1 or self.y_e > height - 1:
            raise ValueError(
                f"bounding box {self.as_list()} exceeds image dimensions {height}x{width}"
            )

    @property
    def width(self) -> int:
        return self.x_e - self.x_s + 1

    @property
    def height(self) -> int:
        return self.y_e - self.y_s + 1

    def area(self) -> int:
        return self.width * self.height

    def as_list(self) -> list[int]:
        return [self.x_s, self.y_s, self.x_e, self.y_e]

    @classmethod
    def from_list(cls, values) -> "BoundingBox":
        vals = [int(v) for v in values]
        if len(vals) != 4:
            raise ValueError(f"bounding box needs 4 coordinates, got {len(vals)}")
        return cls(*vals)

    def crop(self, img: np.ndarray) -> np.ndarray:
        return img[self.y_s : self.y_e + 1, self.x_s : self.x_e + 1]


@dataclass(frozen=True)
class BarcodeConfig:
    """Barcode and query parameters; defaults follow the package-wide
    128/64 global and 64/32 ROI setup with a quarter-dimension click box."""

    global_side: int = 128
    global_angles: int = 64
    roi_side: int = 64
    roi_angles: int = 32
    beta: float = 1.5
    stick_length: int = 5
    delta: float = 0.25
    top_m: int = 5
    use_enhancement: bool = True
    normalize_distances: bool = False

    def __post_init__(self):
        for name in ("global_side", "global_angles", "roi_side", "roi_angles"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.global_side < 2 or self.roi_side < 2:
            raise ValueError("barcode sides must be >= 2")
        if self.beta <= 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")
        if self.stick_length < 3 or self.stick_length % 2 == 0:
            raise ValueError(f"stick_length must be odd and >= 3, got {self.stick_length}")
        if not 0.0 < self.delta <= 0.5:
            raise ValueError(f"delta must lie in (0, 0.5], got {self.delta}")
        if self.top_m < 1:
            raise ValueError(f"top_m must be >= 1, got {self.top_m}")

    @property
    def global_bits(self) -> int:
        return self.global_side * self.global_angles

    @property
    def roi_bits(self) -> int:
        return self.roi_side * self.roi_angles

    def to_dict(self) -> dict:
        return {
            "global_side": self.global_side,
            "global_angles": self.global_angles,
            "roi_side": self.roi_side,
            "roi_angles": self.roi_angles,
            "beta": self.beta,
            "stick_length": self.stick_length,
            "delta": self.delta,
            "top_m": self.top_m,
            "use_enhancement": self.use_enhancement,
            "normalize_distances": self.normalize_distances,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BarcodeConfig":
        return cls(**data)


@dataclass(frozen=True)
class CaseRecord:
    """One indexed image: native dims, lesion box, and its two barcodes."""

    case_id: str
    height: int
    width: int
    bbox: BoundingBox
    global_code: RadonBarcode
    roi_code: RadonBarcode
    image_path: str | None = None


@dataclass(frozen=True)
class IndexDatabase:
    config: BarcodeConfig
    cases: tuple[CaseRecord, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "cases", tuple(self.cases))
        ids = [c.case_id for c in self.cases]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValueError(f"duplicate case ids in index: {dupes}")
        for case in self.cases:
            self._validate_case(case)

    def _validate_case(self, case: CaseRecord) -> None:
        cfg = self.config
        if len(case.global_code) != cfg.global_bits or case.global_code.num_angles != cfg.global_angles:
            raise ValueError(
                f"case {case.case_id!r}: global barcode shape does not match index config"
            )
        if len(case.roi_code) != cfg.roi_bits or case.roi_code.num_angles != cfg.roi_angles:
            raise ValueError(
                f"case {case.case_id!r}: ROI barcode shape does not match index config"
            )
        case.bbox.validate_for(case.height, case.width)

    def __len__(self) -> int:
        return len(self.cases)

    def case_by_id(self, case_id: str) -> CaseRecord:
        for case in self.cases:
            if case.case_id == case_id:
                return case
        raise KeyError(f"unknown case id {case_id!r}")

    def without(self, case_id: str) -> "IndexDatabase":
        return replace(self, cases=tuple(c for c in self.cases if c.case_id != case_id))


def bbox_from_mask(mask) -> BoundingBox:
    """Tightest box containing every nonzero mask pixel."""
    m = as_gray_array(mask)
    ys, xs = np.nonzero(m)
    if ys.size == 0:
        raise ValueError("mask has no nonzero pixels")
    return BoundingBox(int(xs.min()), int(ys.min()), int(xs.max()), int(ys.max()))


def preprocess_image(img, cfg: BarcodeConfig) -> np.ndarray:
    """Enhancement chain applied identically at index and query time:
    hyperbolization then sticks filtering (skipped when disabled in cfg)."""
    a = as_gray_array(img)
    if not cfg.use_enhancement:
        return a
    out = hyperbolize(a, cfg.beta)
    return sticks_filter(out, cfg.stick_length)


def index_case(case_id: str, img, gt, cfg: BarcodeConfig, image_path: str | None = None) -> CaseRecord:
    """Build the record for one training image.

    ``gt`` is either a BoundingBox or a nonzero-lesion mask image; masks
    are reduced to their tight box first. The global barcode is taken
    from the preprocessed full image, the ROI barcode from the box crop
    of that same preprocessed image.
    """
    a = as_gray_array(img)
    rows, cols = a.shape
    bbox = gt if isinstance(gt, BoundingBox) else bbox_from_mask(gt)
    bbox.validate_for(rows, cols)
    pre = preprocess_image(a, cfg)
    global_code = generate_barcode(pre, cfg.global_side, cfg.global_angles)
    roi_code = generate_barcode(bbox.crop(pre), cfg.roi_side, cfg.roi_angles)
    return CaseRecord(
        case_id=str(case_id),
        height=rows,
        width=cols,
        bbox=bbox,
        global_code=global_code,
        roi_code=roi_code,
        image_path=image_path,
    )


def _case_to_dict(case: CaseRecord) -> dict:
    return {
        "case_id": case.case_id,
        "image_path": case.image_path,
        "height": case.height,
        "width": case.width,
        "bbox": case.bbox.as_list(),
        "global_code": case.global_code.to01(),
        "roi_code": case.roi_code.to01(),
    }


def _case_from_dict(data: dict, cfg: BarcodeConfig) -> CaseRecord:
    case_id = data["case_id"]
    for key, text, angles, side in (
        ("global_code", data["global_code"], cfg.global_angles, cfg.global_side),
        ("roi_code", data["roi_code"], cfg.roi_angles, cfg.roi_side),
    ):
        if len(text) != angles * side:
            raise ValueError(
                f"case {case_id!r}: {key} has {len(text)} bits, expected {angles * side}"
            )
    return CaseRecord(
        case_id=case_id,
        height=int(data["height"]),
        width=int(data["width"]),
        bbox=BoundingBox.from_list(data["bbox"]),
        global_code=RadonBarcode.from01(data["global_code"], cfg.global_angles, cfg.global_side),
        roi_code=RadonBarcode.from01(data["roi_code"], cfg.roi_angles, cfg.roi_side),
        image_path=data.get("image_path"),
    )


def save_index(db: IndexDatabase, path) -> None:
    """Write the database as a versioned JSON document."""
    doc = {
        "format_version": FORMAT_VERSION,
        "config": db.config.to_dict(),
        "cases": [_case_to_dict(c) for c in db.cases],
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_index(path) -> IndexDatabase:
    """Load and validate an index file written by ``save_index``.

    Raises ValueError naming the offending case on any shape, bounds,
    or duplicate-id violation.
    """
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"index file not found: {p}")
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"index file {p} is not valid JSON: {exc}") from exc
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported index format_version {version!r} (expected {FORMAT_VERSION})")
    cfg = BarcodeConfig.from_dict(doc["config"])
    cases = [_case_from_dict(c, cfg) for c in doc["cases"]]
    return IndexDatabase(config=cfg, cases=tuple(cases))
