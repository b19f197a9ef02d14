"""Leave-one-out evaluation and the synthetic phantom dataset.

The harness scores the full pipeline: for every case, an index is built
from all other cases, the held-out image is queried with a click
simulated at its ground-truth centre, and the estimated box is Dice-scored
against the ground truth. The phantom generator supplies a deterministic
speckled-ultrasound stand-in (dark elliptical lesions on a bright noisy
background, grouped into pose clusters) for desk-scale validation.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .image import round_half_away
from .index import BarcodeConfig, BoundingBox, IndexDatabase, bbox_from_mask, index_case
from .search import dice, query

THREADS_ENV_VAR = "RADON_ROI_THREADS"


@dataclass(frozen=True)
class LabeledCase:
    case_id: str
    image: np.ndarray
    bbox: BoundingBox
    cluster: int | None = None
    image_path: str | None = None


@dataclass(frozen=True)
class LabeledDataset:
    cases: tuple[LabeledCase, ...]

    def __post_init__(self):
        object.__setattr__(self, "cases", tuple(self.cases))
        ids = [c.case_id for c in self.cases]
        if len(set(ids)) != len(ids):
            raise ValueError("dataset case ids must be unique")
        for c in self.cases:
            c.bbox.validate_for(*c.image.shape)

    def __len__(self) -> int:
        return len(self.cases)

    def cluster_of(self, case_id: str) -> int | None:
        for c in self.cases:
            if c.case_id == case_id:
                return c.cluster
        raise KeyError(f"unknown case id {case_id!r}")


@dataclass(frozen=True)
class CaseResult:
    case_id: str
    dice: float
    estimated_bbox: BoundingBox
    matched_case_ids: tuple[str, ...]


@dataclass(frozen=True)
class EvalReport:
    cases: tuple[CaseResult, ...]
    mean_dice: float
    std_dice: float

    @property
    def num_cases(self) -> int:
        return len(self.cases)

    def to_dict(self) -> dict:
        return {
            "num_cases": self.num_cases,
            "mean_dice": round(self.mean_dice, 9),
            "std_dice": round(self.std_dice, 9),
            "cases": [
                {
                    "case_id": c.case_id,
                    "dice": round(c.dice, 9),
                    "estimated_bbox": c.estimated_bbox.as_list(),
                    "matched_case_ids": list(c.matched_case_ids),
                }
                for c in self.cases
            ],
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["case_id", "dice", "matched_case_ids"])
        for c in self.cases:
            writer.writerow([c.case_id, f"{c.dice:.6f}", ";".join(c.matched_case_ids)])
        return buf.getvalue()


def simulate_click(gt: BoundingBox) -> tuple[int, int]:
    """Geometric centre of the ground-truth box, round half up."""
    x_c = int(round_half_away((gt.x_s + gt.x_e) / 2.0))
    y_c = int(round_half_away((gt.y_s + gt.y_e) / 2.0))
    return x_c, y_c


def max_workers_from_env(default: int = 1) -> int:
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"{THREADS_ENV_VAR} must be a positive integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError(f"{THREADS_ENV_VAR} must be a positive integer, got {raw!r}")
    return value


def leave_one_out(
    ds: LabeledDataset, cfg: BarcodeConfig, max_workers: int | None = None
) -> EvalReport:
    """Score every case with an index built from all the others.

    Records are built once (indexing is deterministic and fold-independent)
    and each fold assembles its index by dropping the held-out record.
    Folds are independent; ``max_workers`` > 1 runs them concurrently with
    results assembled in case order either way. ``max_workers`` defaults
    to the RADON_ROI_THREADS environment variable, else serial.
    """
    if len(ds) < 2:
        raise ValueError(f"leave-one-out needs at least 2 cases, got {len(ds)}")
    workers = max_workers if max_workers is not None else max_workers_from_env()

    records = [index_case(c.case_id, c.image, c.bbox, cfg, image_path=c.image_path) for c in ds.cases]

    def run_fold(i: int) -> CaseResult:
        held_out = ds.cases[i]
        db = IndexDatabase(config=cfg, cases=tuple(records[:i] + records[i + 1 :]))
        click = simulate_click(held_out.bbox)
        result = query(db, held_out.image, click)
        return CaseResult(
            case_id=held_out.case_id,
            dice=dice(held_out.bbox, result.estimated_bbox),
            estimated_bbox=result.estimated_bbox,
            matched_case_ids=tuple(m.case_id for m in result.matches),
        )

    indices = range(len(ds))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_fold, indices))
    else:
        results = [run_fold(i) for i in indices]

    scores = np.array([r.dice for r in results])
    return EvalReport(
        cases=tuple(results),
        mean_dice=float(scores.mean()),
        std_dice=float(scores.std()),  # population std over the single cohort
    )


def _cluster_pose(k: int, num_clusters: int) -> tuple[float, float, float, float]:
    """Characteristic lesion pose for cluster k: centre and half-axes as
    fractions of the image dims. Clusters sit on a ring around the image
    centre with alternating orientation and growing size."""
    angle = 2.0 * math.pi * k / num_clusters - math.pi / 2.0
    cx = 0.5 + 0.24 * math.cos(angle)
    cy = 0.5 + 0.24 * math.sin(angle)
    scale = 1.0 + (0.25 * k / max(num_clusters - 1, 1))
    ax, ay = (0.17, 0.11) if k % 2 == 0 else (0.11, 0.17)
    return cx, cy, ax * scale, ay * scale


def cluster_pose_box(k: int, num_clusters: int, dims: tuple[int, int]) -> BoundingBox:
    """Unjittered lesion box for cluster k (the centre of its pose region)."""
    rows, cols = dims
    cx, cy, ax, ay = _cluster_pose(k, num_clusters)
    mask = _ellipse_mask(rows, cols, cx * (cols - 1), cy * (rows - 1), ax * cols, ay * rows)
    return bbox_from_mask(mask)


def _ellipse_mask(rows: int, cols: int, cx: float, cy: float, ax: float, ay: float) -> np.ndarray:
    ygrid = np.arange(rows, dtype=np.float64)[:, np.newaxis]
    xgrid = np.arange(cols, dtype=np.float64)[np.newaxis, :]
    return ((xgrid - cx) / ax) ** 2 + ((ygrid - cy) / ay) ** 2 <= 1.0


def generate_synthetic_dataset(
    seed: int,
    num_clusters: int = 4,
    per_cluster: int = 10,
    dims: tuple[int, int] = (128, 128),
    background: float = 190.0,
    lesion_contrast: float = 0.62,
    speckle_looks: float = 6.0,
) -> LabeledDataset:
    """Deterministic phantom dataset of dark elliptical lesions on a bright
    speckled background.

    Each cluster has a characteristic pose (centre and half-axes); members
    jitter the centre by up to 4% of the dims and the axes by up to 8%.
    Speckle is multiplicative gamma noise with unit mean. The ground truth
    is the tight box of the rendered ellipse.
    """
    if num_clusters < 2:
        raise ValueError(f"num_clusters must be >= 2, got {num_clusters}")
    if per_cluster < 2:
        raise ValueError(f"per_cluster must be >= 2, got {per_cluster}")
    rows, cols = dims
    rng = np.random.default_rng(seed)
    cases: list[LabeledCase] = []
    for k in range(num_clusters):
        cx0, cy0, ax0, ay0 = _cluster_pose(k, num_clusters)
        for j in range(per_cluster):
            cx = (cx0 + rng.uniform(-0.04, 0.04)) * (cols - 1)
            cy = (cy0 + rng.uniform(-0.04, 0.04)) * (rows - 1)
            ax = ax0 * cols * rng.uniform(0.92, 1.08)
            ay = ay0 * rows * rng.uniform(0.92, 1.08)
            inside = _ellipse_mask(rows, cols, cx, cy, ax, ay)
            base = np.where(inside, background * (1.0 - lesion_contrast), background)
            speckle = rng.gamma(shape=speckle_looks, scale=1.0 / speckle_looks, size=(rows, cols))
            img = np.clip(round_half_away(base * speckle), 0, 255).astype(np.uint8)
            cases.append(
                LabeledCase(
                    case_id=f"c{k}_{j:02d}",
                    image=img,
                    bbox=bbox_from_mask(inside),
                    cluster=k,
                )
            )
    return LabeledDataset(cases=tuple(cases))
