"""HTTP front end for a rating session.

Rater-facing endpoints (next case, slice render, volume download, meta)
are built from explicit response dicts that never include the truth field
or class counts.  The report and CSV export require the session's admin
token in the X-Admin-Token header.  A static UI directory, when given, is
mounted last so the API routes keep priority.
"""

from __future__ import annotations

import tempfile
from pathlib import Path

from fastapi import FastAPI, Header, HTTPException, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from ..errors import OutOfRangeError, ValidationError
from ..nifti import load_volume, write_nifti
from ..volume import Volume
from .render import default_window_level, render_slice_png
from .report import ratings_csv, session_report
from .session import RatingJournal, VttSession, next_case_for, submit_rating


class RatingIn(BaseModel):
    rater_id: str
    case_id: str
    score: int = Field(ge=1, le=10)


def create_app(
    session: VttSession,
    journal: RatingJournal,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="rating session", docs_url=None, redoc_url=None)
    volumes: dict[str, Volume] = {}
    nifti_cache: dict[str, bytes] = {}

    def _check_session(sid: str) -> None:
        if sid != session.session_id:
            raise HTTPException(status_code=404, detail="unknown session")

    def _volume(case_id: str) -> Volume:
        case = session.case(case_id)
        if case_id not in volumes:
            volumes[case_id] = load_volume(case.path, case.intensity_kind)
        return volumes[case_id]

    def _require_admin(token: str | None) -> None:
        if not session.admin_token or token != session.admin_token:
            raise HTTPException(status_code=401, detail="admin token required")

    @app.exception_handler(ValidationError)
    async def _validation_error(request, exc):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(OutOfRangeError)
    async def _range_error(request, exc):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/session/{sid}/next")
    def next_case(sid: str, rater: str):
        _check_session(sid)
        records = journal.snapshot()
        case, done, total = next_case_for(session, records, rater)
        progress = {"done": done, "total": total}
        if case is None:
            return {"done": True, "case": None, "progress": progress}
        vol = _volume(case.case_id)
        axis = case.slice_axis
        index = case.slice_index
        if index is None:
            index = vol.dims[axis] // 2
        window, level = default_window_level(vol)
        base = f"/session/{sid}/case/{case.case_id}"
        payload = {
            "case_id": case.case_id,
            "presentation": case.presentation,
            "slice_axis": axis,
            "slice_index": index,
            "window": window,
            "level": level,
            "slice_url": f"{base}/slice.png",
            "meta_url": f"{base}/meta",
            "volume_url": f"{base}/volume.nii.gz" if case.presentation == "volume" else None,
        }
        return {"done": False, "case": payload, "progress": progress}

    @app.get("/session/{sid}/case/{case_id}/meta")
    def case_meta(sid: str, case_id: str):
        _check_session(sid)
        case = session.case(case_id)
        vol = _volume(case_id)
        window, level = default_window_level(vol)
        return {
            "case_id": case.case_id,
            "presentation": case.presentation,
            "dims": list(vol.dims),
            "spacing": list(vol.spacing),
            "intensity_kind": vol.intensity_kind,
            "default_window": window,
            "default_level": level,
            "slice_axis": case.slice_axis,
        }

    @app.get("/session/{sid}/case/{case_id}/slice.png")
    def case_slice(
        sid: str,
        case_id: str,
        axis: int | None = None,
        index: int | None = None,
        window: float | None = None,
        level: float | None = None,
    ):
        _check_session(sid)
        case = session.case(case_id)
        vol = _volume(case_id)
        if axis is None:
            axis = case.slice_axis
        if not 0 <= axis <= 2:
            raise ValidationError(f"axis must be 0..2, got {axis}")
        if index is None:
            index = case.slice_index
            if index is None:
                index = vol.dims[axis] // 2
        png = render_slice_png(vol, axis, index, window, level)
        return Response(content=png, media_type="image/png")

    @app.get("/session/{sid}/case/{case_id}/volume.nii.gz")
    def case_volume(sid: str, case_id: str):
        _check_session(sid)
        session.case(case_id)
        if case_id not in nifti_cache:
            vol = _volume(case_id)
            with tempfile.TemporaryDirectory() as tmp:
                path = Path(tmp) / "case.nii.gz"
                write_nifti(vol, str(path))
                nifti_cache[case_id] = path.read_bytes()
        return Response(
            content=nifti_cache[case_id],
            media_type="application/gzip",
            headers={
                "Content-Disposition": f'attachment; filename="{case_id}.nii.gz"'
            },
        )

    @app.post("/session/{sid}/rating")
    def post_rating(sid: str, body: RatingIn):
        _check_session(sid)
        rec = submit_rating(session, journal, body.rater_id, body.case_id, body.score)
        return {
            "ok": True,
            "rater_id": rec.rater_id,
            "case_id": rec.case_id,
            "score": rec.score,
        }

    @app.get("/session/{sid}/report")
    def report(
        sid: str,
        alpha: str = "default",
        x_admin_token: str | None = Header(default=None, alias="X-Admin-Token"),
    ):
        _check_session(sid)
        _require_admin(x_admin_token)
        return session_report(session, journal.snapshot(), alpha)

    @app.get("/session/{sid}/ratings.csv")
    def export_csv(
        sid: str,
        x_admin_token: str | None = Header(default=None, alias="X-Admin-Token"),
    ):
        _check_session(sid)
        _require_admin(x_admin_token)
        return Response(content=ratings_csv(journal.snapshot()), media_type="text/csv")

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
