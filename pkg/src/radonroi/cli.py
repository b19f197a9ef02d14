"""Command-line front door: index, query, eval, synth, serve.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .evaluation import (
    LabeledCase,
    LabeledDataset,
    generate_synthetic_dataset,
    leave_one_out,
    max_workers_from_env,
)
from .image import load_grayscale, save_png
from .index import (
    BarcodeConfig,
    BoundingBox,
    IndexDatabase,
    bbox_from_mask,
    index_case,
    load_index,
    save_index,
)
from .overlay import render_overlay
from .search import query

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; remap to this tool's convention
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    defaults = BarcodeConfig()
    parser.add_argument("--global-side", type=int, default=defaults.global_side)
    parser.add_argument("--global-angles", type=int, default=defaults.global_angles)
    parser.add_argument("--roi-side", type=int, default=defaults.roi_side)
    parser.add_argument("--roi-angles", type=int, default=defaults.roi_angles)
    parser.add_argument("--beta", type=float, default=defaults.beta)
    parser.add_argument("--stick-length", type=int, default=defaults.stick_length)
    parser.add_argument("--delta", type=float, default=defaults.delta)
    parser.add_argument("--m", type=int, default=defaults.top_m, help="top matches to average")
    parser.add_argument(
        "--no-enhance",
        action="store_true",
        help="generate barcodes from raw instead of enhanced images",
    )


def _config_from_args(args) -> BarcodeConfig:
    return BarcodeConfig(
        global_side=args.global_side,
        global_angles=args.global_angles,
        roi_side=args.roi_side,
        roi_angles=args.roi_angles,
        beta=args.beta,
        stick_length=args.stick_length,
        delta=args.delta,
        top_m=args.m,
        use_enhancement=not args.no_enhance,
    )


def _parse_click(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"click must be 'x,y', got {text!r}")
    return int(parts[0]), int(parts[1])


def _parse_dims(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise ValueError(f"dims must be 'HxW', got {text!r}")
    rows, cols = int(parts[0]), int(parts[1])
    if rows < 1 or cols < 1:
        raise ValueError(f"dims must be positive, got {text!r}")
    return rows, cols


def read_manifest(path) -> list[dict]:
    """Read a JSON-lines dataset manifest: one object per line with
    case_id, image, and either mask or bbox; paths relative to the file."""
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"manifest not found: {p}")
    entries = []
    for lineno, line in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{p}:{lineno}: invalid JSON: {exc}") from exc
        for key in ("case_id", "image"):
            if key not in obj:
                raise ValueError(f"{p}:{lineno}: missing required key {key!r}")
        if "mask" not in obj and "bbox" not in obj:
            raise ValueError(f"{p}:{lineno}: entry needs either 'mask' or 'bbox'")
        obj["image"] = str((p.parent / obj["image"]).resolve())
        if "mask" in obj:
            obj["mask"] = str((p.parent / obj["mask"]).resolve())
        entries.append(obj)
    return entries


def _entry_ground_truth(entry: dict):
    if "bbox" in entry:
        return BoundingBox.from_list(entry["bbox"])
    return bbox_from_mask(load_grayscale(entry["mask"]))


def cmd_index(args) -> int:
    cfg = _config_from_args(args)
    try:
        entries = read_manifest(args.manifest)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    records = []
    failures = 0
    for entry in entries:
        case_id = entry["case_id"]
        try:
            img = load_grayscale(entry["image"])
            gt = _entry_ground_truth(entry)
            records.append(index_case(case_id, img, gt, cfg, image_path=entry["image"]))
        except (OSError, ValueError) as exc:
            failures += 1
            print(f"skipping case {case_id!r}: {exc}", file=sys.stderr)
    if not records:
        print("error: no valid cases to index", file=sys.stderr)
        return EXIT_DATA
    db = IndexDatabase(config=cfg, cases=tuple(records))
    save_index(db, args.out)
    print(f"indexed {len(records)} cases -> {args.out}")
    return EXIT_DATA if failures else EXIT_OK


def cmd_query(args) -> int:
    try:
        db = load_index(args.index)
    except (OSError, ValueError) as exc:
        print(f"error: cannot load index: {exc}", file=sys.stderr)
        return EXIT_DATA
    try:
        img = load_grayscale(args.image)
    except (OSError, ValueError) as exc:
        print(f"error: cannot load image: {exc}", file=sys.stderr)
        return EXIT_DATA
    try:
        click = _parse_click(args.click)
        result = query(db, img, click, top_m=args.m)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    print(result.to_json())
    if args.overlay:
        canvas = render_overlay(img, estimate=result.estimated_bbox, query_box=result.query_bbox)
        save_png(canvas, args.overlay)
    return EXIT_OK


def _dataset_from_manifest(path) -> LabeledDataset:
    entries = read_manifest(path)
    cases = []
    for entry in entries:
        img = load_grayscale(entry["image"])
        gt = _entry_ground_truth(entry)
        cases.append(
            LabeledCase(
                case_id=entry["case_id"],
                image=img,
                bbox=gt,
                cluster=entry.get("cluster"),
                image_path=entry["image"],
            )
        )
    return LabeledDataset(cases=tuple(cases))


def cmd_eval(args) -> int:
    cfg = _config_from_args(args)
    try:
        if args.manifest:
            ds = _dataset_from_manifest(args.manifest)
        else:
            ds = generate_synthetic_dataset(
                seed=args.seed,
                num_clusters=args.clusters,
                per_cluster=args.per_cluster,
                dims=_parse_dims(args.dims),
            )
        report = leave_one_out(ds, cfg, max_workers=max_workers_from_env())
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    print(report.to_json())
    Path(args.csv).write_text(report.to_csv(), encoding="utf-8")
    if args.overlay_dir:
        out_dir = Path(args.overlay_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        by_id = {c.case_id: c for c in ds.cases}
        for case_result in report.cases:
            lc = by_id[case_result.case_id]
            canvas = render_overlay(lc.image, gt=lc.bbox, estimate=case_result.estimated_bbox)
            save_png(canvas, out_dir / f"{case_result.case_id}.png")
    return EXIT_OK


def cmd_synth(args) -> int:
    try:
        ds = generate_synthetic_dataset(
            seed=args.seed,
            num_clusters=args.clusters,
            per_cluster=args.per_cluster,
            dims=_parse_dims(args.dims),
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = []
    for case in ds.cases:
        image_name = f"{case.case_id}.png"
        save_png(case.image, out_dir / image_name)
        lines.append(
            json.dumps(
                {
                    "case_id": case.case_id,
                    "image": image_name,
                    "bbox": case.bbox.as_list(),
                    "cluster": case.cluster,
                }
            )
        )
    manifest = out_dir / "manifest.jsonl"
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(ds)} cases -> {out_dir}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    try:
        app = create_app(index_path=args.index, static_dir=args.static)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="radonroi", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_index = sub.add_parser("index", help="build an index from a dataset manifest")
    p_index.add_argument("--manifest", required=True, help="JSON-lines dataset manifest")
    p_index.add_argument("--out", required=True, help="output index file")
    _add_config_flags(p_index)
    p_index.set_defaults(func=cmd_index)

    p_query = sub.add_parser("query", help="estimate a box for a new image from a click")
    p_query.add_argument("--index", required=True)
    p_query.add_argument("--image", required=True)
    p_query.add_argument("--click", required=True, metavar="X,Y")
    p_query.add_argument("--m", type=int, default=None, help="override top-M for this query")
    p_query.add_argument("--overlay", default=None, help="write an overlay PNG here")
    p_query.set_defaults(func=cmd_query)

    p_eval = sub.add_parser("eval", help="leave-one-out evaluation")
    source = p_eval.add_mutually_exclusive_group()
    source.add_argument("--manifest", default=None, help="JSON-lines dataset manifest")
    source.add_argument("--synth", action="store_true", help="use the synthetic phantom dataset")
    p_eval.add_argument("--seed", type=int, default=42)
    p_eval.add_argument("--clusters", type=int, default=4)
    p_eval.add_argument("--per-cluster", type=int, default=10)
    p_eval.add_argument("--dims", default="128x128", metavar="HxW")
    p_eval.add_argument("--csv", default="loo_cases.csv", help="per-case CSV output path")
    p_eval.add_argument("--overlay-dir", default=None, help="write per-case overlay PNGs here")
    _add_config_flags(p_eval)
    p_eval.set_defaults(func=cmd_eval)

    p_synth = sub.add_parser("synth", help="write a synthetic phantom dataset to disk")
    p_synth.add_argument("--out", required=True, help="output directory")
    p_synth.add_argument("--seed", type=int, default=42)
    p_synth.add_argument("--clusters", type=int, default=4)
    p_synth.add_argument("--per-cluster", type=int, default=10)
    p_synth.add_argument("--dims", default="128x128", metavar="HxW")
    p_synth.set_defaults(func=cmd_synth)

    p_serve = sub.add_parser("serve", help="run the HTTP query service")
    p_serve.add_argument("--index", required=True)
    p_serve.add_argument("--static", default=None, help="directory of UI assets to serve at /")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
