"""HTTP facade over the index for the click-to-query UI.

The loaded index is held as an immutable snapshot; POST /api/reload
swaps in a freshly loaded snapshot atomically, so concurrent requests
never observe a half-built index. Queries against an indexed case id
run with that case excluded, mirroring the leave-one-out protocol.
"""

from __future__ import annotations

import base64
import binascii
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from PIL import Image, UnidentifiedImageError
from pydantic import BaseModel, Field

from .image import load_grayscale
from .index import IndexDatabase, load_index
from .search import query


@dataclass(frozen=True)
class Snapshot:
    db: IndexDatabase | None
    index_path: str | None


class ClickBody(BaseModel):
    x: int
    y: int


class QueryBody(BaseModel):
    case_id: str | None = None
    image_b64: str | None = None
    click: ClickBody
    m: int | None = Field(default=None, ge=1)


class ReloadBody(BaseModel):
    index_path: str | None = None


def _decode_image_b64(data: str) -> np.ndarray:
    try:
        raw = base64.b64decode(data, validate=True)
        with Image.open(io.BytesIO(raw)) as im:
            im.load()
            if im.mode != "L":
                im = im.convert("L")
            return np.asarray(im, dtype=np.uint8)
    except (binascii.Error, UnidentifiedImageError, OSError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=f"cannot decode uploaded image: {exc}")


def _png_bytes(arr: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(arr).save(buf, format="PNG")
    return buf.getvalue()


def create_app(index_path: str | None = None, static_dir: str | None = None) -> FastAPI:
    """Build the service app, optionally preloading an index file and
    mounting a static UI directory at the web root."""
    app = FastAPI(title="radonroi service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    db = load_index(index_path) if index_path else None
    app.state.snapshot = Snapshot(db=db, index_path=str(index_path) if index_path else None)

    def current_db() -> IndexDatabase:
        snap: Snapshot = app.state.snapshot
        if snap.db is None:
            raise HTTPException(status_code=503, detail="no index loaded")
        return snap.db

    @app.get("/api/cases")
    def list_cases():
        db = current_db()
        return [
            {
                "case_id": c.case_id,
                "dims": [c.height, c.width],
                "bbox": c.bbox.as_list(),
            }
            for c in db.cases
        ]

    @app.get("/api/image/{case_id}")
    def get_image(case_id: str):
        db = current_db()
        try:
            case = db.case_by_id(case_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown case id {case_id!r}")
        if not case.image_path or not Path(case.image_path).is_file():
            raise HTTPException(status_code=404, detail=f"no stored image for case {case_id!r}")
        arr = load_grayscale(case.image_path)
        return Response(content=_png_bytes(arr), media_type="image/png")

    @app.post("/api/query")
    def run_query(body: QueryBody):
        db = current_db()
        if (body.case_id is None) == (body.image_b64 is None):
            raise HTTPException(
                status_code=400, detail="provide exactly one of case_id or image_b64"
            )
        if body.case_id is not None:
            try:
                case = db.case_by_id(body.case_id)
            except KeyError:
                raise HTTPException(status_code=404, detail=f"unknown case id {body.case_id!r}")
            if not case.image_path or not Path(case.image_path).is_file():
                raise HTTPException(
                    status_code=404, detail=f"no stored image for case {body.case_id!r}"
                )
            img = load_grayscale(case.image_path)
            # mirror leave-one-out: never let the case match itself
            db = db.without(body.case_id)
            if len(db) == 0:
                raise HTTPException(
                    status_code=400, detail="index has no other cases to match against"
                )
        else:
            img = _decode_image_b64(body.image_b64)
        try:
            result = query(db, img, (body.click.x, body.click.y), top_m=body.m)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return JSONResponse(content=result.to_dict())

    @app.post("/api/reload")
    def reload_index(body: ReloadBody):
        snap: Snapshot = app.state.snapshot
        path = body.index_path or snap.index_path
        if not path:
            raise HTTPException(status_code=400, detail="no index path configured")
        try:
            new_db = load_index(path)
        except (OSError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=f"cannot load index: {exc}")
        app.state.snapshot = Snapshot(db=new_db, index_path=str(path))
        return {"cases": len(new_db)}

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
