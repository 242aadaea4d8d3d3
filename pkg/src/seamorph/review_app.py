"""HTTP surface for the review workflow (JSON bodies throughout).

Endpoints:
    POST /api/session                      create a session (sample_size, seed, subset)
    GET  /api/session/{id}/next            next unreviewed item or {"done": true}
    POST /api/session/{id}/verdict         submit rule flags for one item
    GET  /api/session/{id}/stats           per-session counts and good rate
    GET  /api/stats?sessions=a,b           mean/std of good rates across sessions
    GET  /api/image/{edited_id}            image bytes (?which=source for the original)

When built with an annotations file, the next-item payload carries the
ground-truth boat boxes so clients can overlay them.
"""
from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import FileResponse, JSONResponse
from pydantic import BaseModel, Field

from .errors import (
    DuplicateVerdict,
    NoSessions,
    UnknownItem,
    UnknownSession,
)
from .manifest import load_manifest
from .review import DEFAULT_SAMPLE_SIZE, ReviewStore
from .types import SourceImage


class SessionBody(BaseModel):
    sample_size: int = DEFAULT_SAMPLE_SIZE
    seed: int = 0
    subset: str = "kept"
    session_id: str | None = None


class VerdictBody(BaseModel):
    edited_id: str
    reviewer: str = "anonymous"
    rule_flags: dict[str, bool] = Field(default_factory=dict)


def create_app(
    store: ReviewStore,
    images_root: Path,
    sources: list[SourceImage] | None = None,
    ui_dir: Path | None = None,
) -> FastAPI:
    app = FastAPI(title="seamorph review service")
    # the browser client may be served from another origin (dev server or
    # file://); the service has no auth surface, so allow-all is safe here
    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    images_root = Path(images_root)
    sources_by_id = {s.id: s for s in sources or []}

    def record_for(edited_id: str):
        records = {r.edited_id: r for r in load_manifest(store.manifest_path)}
        if edited_id not in records:
            raise HTTPException(status_code=404, detail=f"unknown image {edited_id!r}")
        return records[edited_id]

    @app.exception_handler(UnknownSession)
    @app.exception_handler(UnknownItem)
    async def _not_found(request, exc):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(DuplicateVerdict)
    async def _conflict(request, exc):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(NoSessions)
    @app.exception_handler(ValueError)
    async def _bad_request(request, exc):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.post("/api/session")
    def create_session(body: SessionBody):
        session = store.create_session(
            sample_size=body.sample_size,
            seed=body.seed,
            subset=body.subset,
            session_id=body.session_id,
        )
        return {
            "session_id": session.session_id,
            "n_items": len(session.items),
            "sample_size": session.sample_size,
            "seed": session.seed,
            "subset": session.subset,
        }

    @app.get("/api/session/{session_id}/next")
    def next_item(session_id: str):
        edited_id = store.next_item(session_id)
        session = store.get_session(session_id)
        reviewed = store.session_stats(session_id).n_reviewed
        if edited_id is None:
            return {"done": True, "reviewed": reviewed, "total": len(session.items)}
        record = record_for(edited_id)
        source = sources_by_id.get(record.source_id)
        boxes = (
            [
                {"x": b.x, "y": b.y, "w": b.w, "h": b.h, "label": b.class_label}
                for b in source.boxes
            ]
            if source
            else []
        )
        return {
            "done": False,
            "edited_id": edited_id,
            "source_id": record.source_id,
            "sea_state": record.sea_state,
            "boxes": boxes,
            "reviewed": reviewed,
            "total": len(session.items),
        }

    @app.post("/api/session/{session_id}/verdict")
    def submit_verdict(session_id: str, body: VerdictBody):
        verdict = store.submit_verdict(
            session_id, body.edited_id, body.reviewer, body.rule_flags
        )
        return {
            "edited_id": verdict.edited_id,
            "session_id": verdict.session_id,
            "reviewer": verdict.reviewer,
            "good": verdict.good,
            "rule_flags": verdict.rule_flags,
            "timestamp": verdict.timestamp,
        }

    @app.get("/api/session/{session_id}/stats")
    def session_stats(session_id: str):
        stats = store.session_stats(session_id)
        return {
            "session_id": stats.session_id,
            "n_reviewed": stats.n_reviewed,
            "n_good": stats.n_good,
            "good_rate": stats.good_rate,
        }

    @app.get("/api/stats")
    def cross_stats(sessions: str = Query(...)):
        ids = [s for s in sessions.split(",") if s]
        mean, std = store.good_image_rate(ids)
        return {
            "sessions": ids,
            "mean_good_rate": mean,
            "std_good_rate": std,
            "per_session": [
                {
                    "session_id": sid,
                    "good_rate": store.session_stats(sid).good_rate,
                    "n_reviewed": store.session_stats(sid).n_reviewed,
                }
                for sid in ids
            ],
        }

    @app.get("/api/image/{edited_id}")
    def image_bytes(edited_id: str, which: str = "edited"):
        record = record_for(edited_id)
        if which == "source":
            source = sources_by_id.get(record.source_id)
            if source is None or source.path is None or not Path(source.path).exists():
                raise HTTPException(
                    status_code=404, detail=f"no source image for {edited_id!r}"
                )
            return FileResponse(source.path)
        sub = f"SS{record.sea_state}" if record.kept else "discarded"
        path = images_root / sub / f"{edited_id}.png"
        if not path.exists():
            raise HTTPException(status_code=404, detail=f"image file {path} is absent")
        return FileResponse(path)

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
