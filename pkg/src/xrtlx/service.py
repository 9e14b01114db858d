"""HTTP service exposing questionnaire administration, event ingestion,
metrics and cohort reports.

Thin mapping onto the store and engines: every endpoint exposes one
library operation unchanged, and every failure body is the structured
error object (code, message, optional details).
"""

from __future__ import annotations

from typing import Literal

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import __version__, reports
from .dimensions import dimension_set
from .errors import TlxError, ValidationError
from .events import parse_batch
from .metrics import compute_focused_objects, compute_session_metrics
from .scoring import choices_from_wire
from .store import StudyStore, UserProfile

_STATUS_BY_CODE = {
    "validation": 400,
    "not_found": 404,
    "conflict": 409,
    "state": 409,
    "internal": 500,
}


class StudyCreate(BaseModel):
    name: str
    dimension_set: str
    weighting_mode: str


class SessionCreate(BaseModel):
    user_id: str
    profile: dict


class ChoiceItem(BaseModel):
    pair: tuple[str, str]
    chosen: str


class ChoicesBody(BaseModel):
    choices: list[ChoiceItem]


class RatingsBody(BaseModel):
    ratings: dict[str, int]


def _error_response(code: str, message: str, details: list[str] | None = None) -> JSONResponse:
    body: dict = {"code": code, "message": message}
    if details:
        body["details"] = details
    return JSONResponse(status_code=_STATUS_BY_CODE.get(code, 500), content=body)


def _dimensions_wire(variant) -> list[dict]:
    return [
        {"id": d.id, "label": d.label, "prompt": d.prompt, "group": d.group.value}
        for d in dimension_set(variant).dimensions
    ]


def create_app(store: StudyStore) -> FastAPI:
    app = FastAPI(title="xrtlx", version=__version__, docs_url=None, redoc_url=None)

    @app.exception_handler(TlxError)
    async def tlx_error_handler(request: Request, exc: TlxError):
        return _error_response(exc.code, exc.message, exc.details)

    @app.exception_handler(RequestValidationError)
    async def body_error_handler(request: Request, exc: RequestValidationError):
        details = [
            ".".join(str(part) for part in error["loc"]) + ": " + error["msg"]
            for error in exc.errors()
        ]
        return _error_response("validation", "invalid request body", details)

    @app.exception_handler(StarletteHTTPException)
    async def http_error_handler(request: Request, exc: StarletteHTTPException):
        code = "not_found" if exc.status_code == 404 else "validation"
        if exc.status_code >= 500:
            code = "internal"
        return _error_response(code, str(exc.detail))

    @app.exception_handler(Exception)
    async def fallback_handler(request: Request, exc: Exception):
        return _error_response("internal", "internal server error")

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "version": __version__}

    @app.post("/v1/studies", status_code=201)
    def create_study(body: StudyCreate):
        study = store.create_study(body.name, body.dimension_set, body.weighting_mode)
        doc = study.to_wire()
        doc["dimensions"] = _dimensions_wire(study.dimension_set)
        return doc

    @app.get("/v1/studies/{study_id}")
    def get_study(study_id: str):
        study = store.get_study(study_id)
        doc = study.to_wire()
        doc["dimensions"] = _dimensions_wire(study.dimension_set)
        return doc

    @app.post("/v1/studies/{study_id}/sessions", status_code=201)
    def create_session(study_id: str, body: SessionCreate):
        profile = UserProfile.from_wire(body.profile)
        session = store.create_session(study_id, body.user_id, profile)
        return _session_doc(session)

    @app.get("/v1/sessions/{session_id}")
    def get_session(session_id: str):
        return _session_doc(store.get_session(session_id))

    def _session_doc(session) -> dict:
        study = store.get_study(session.study_id)
        doc = session.to_wire()
        doc["dimension_set"] = study.dimension_set.value
        doc["weighting_mode"] = study.weighting_mode.value
        doc["dimensions"] = _dimensions_wire(study.dimension_set)
        return doc

    @app.get("/v1/sessions/{session_id}/pairs")
    def get_pairs(session_id: str, seed: int | None = Query(default=None)):
        session = store.get_session(session_id)
        study = store.get_study(session.study_id)
        pairs = store.pairs_for_session(session_id, seed)
        return {
            "session_id": session_id,
            "mode": study.weighting_mode.value,
            "pairs": [list(pair) for pair in pairs],
        }

    @app.post("/v1/sessions/{session_id}/choices")
    def post_choices(session_id: str, body: ChoicesBody):
        choices = choices_from_wire(
            [{"pair": c.pair, "chosen": c.chosen} for c in body.choices]
        )
        session = store.record_choices(session_id, choices)
        return {"session_id": session_id, "state": session.state.value}

    @app.post("/v1/sessions/{session_id}/ratings")
    def post_ratings(session_id: str, body: RatingsBody):
        store.record_ratings(session_id, body.ratings)
        score = store.score_and_persist(session_id)
        return {"session_id": session_id, "state": "scored", "score": score.to_wire()}

    @app.get("/v1/sessions/{session_id}/score")
    def get_score(session_id: str):
        return store.get_score(session_id).to_wire()

    @app.post("/v1/sessions/{session_id}/events")
    async def post_events(session_id: str, request: Request):
        raw = await request.body()
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ValidationError(f"event batch is not valid UTF-8: {exc}") from None
        batch = parse_batch(text)
        result = store.append_events(session_id, batch)
        return {"appended": result.appended, "deduplicated": result.deduplicated}

    @app.get("/v1/sessions/{session_id}/metrics")
    def get_metrics(session_id: str):
        events = store.read_events(session_id)
        metrics = compute_session_metrics(events)
        summaries = compute_focused_objects(events)
        return {
            "session_id": session_id,
            "metrics": metrics.to_wire(),
            "objects": [s.to_wire() for s in summaries],
        }

    @app.get("/v1/studies/{study_id}/report")
    def get_report(
        study_id: str,
        group_by: str = Query(...),
        format: Literal["csv", "json"] = Query(default="csv"),
    ):
        rendered = reports.cohort_report(store, study_id, group_by, format)
        media = "text/csv" if format == "csv" else "application/json"
        return Response(content=rendered, media_type=media)

    return app


def serve(bind: str, store_path: str) -> None:
    """Run the service until interrupted; in-flight requests finish on shutdown."""
    import uvicorn

    host, _, port_text = bind.rpartition(":")
    if not host or not port_text.isdigit():
        raise ValidationError(f"bind address must look like 127.0.0.1:8000, got {bind!r}")
    app = create_app(StudyStore(store_path))
    uvicorn.run(app, host=host, port=int(port_text), log_level="warning")
