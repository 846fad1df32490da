"""HTTP+JSON API over the session service."""

from __future__ import annotations

import logging
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from critics.crplan.catalog import get_criterion
from critics.crplan.types import CrPlanConfig, Critique, LeaderDecision
from critics.crtext.types import CrTextConfig
from critics.errors import (
    Conflict,
    CriticsError,
    IllegalState,
    IndexOutOfRange,
    NotFound,
    RoundIncomplete,
    SessionError,
    StorageError,
    UnknownRound,
    ValidationError,
)
from critics.gateway import Backend
from critics.session.model import HumanMark
from critics.session.service import SessionService, compute_user_metrics
from critics.session.storage import SessionStore
from critics.story import parse_story_package, segment_sentences

log = logging.getLogger(__name__)

_STATUS_BY_ERROR = (
    (NotFound, 404),
    (UnknownRound, 404),
    (Conflict, 409),
    (IllegalState, 409),
    (RoundIncomplete, 409),
    (IndexOutOfRange, 422),
    (ValidationError, 422),
    (StorageError, 500),
)


def _http_status(exc: SessionError) -> int:
    for cls, status in _STATUS_BY_ERROR:
        if isinstance(exc, cls):
            return status
    return 400


def _parse_config(stage: str, overrides: dict) -> CrPlanConfig | CrTextConfig:
    overrides = dict(overrides or {})
    if stage == "plan":
        if "criteria" in overrides:
            overrides["criteria"] = tuple(get_criterion(cid) for cid in overrides["criteria"])
        return CrPlanConfig(**overrides)
    return CrTextConfig(**overrides)


def create_app(data_dir: str | Path, backend: Backend, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="collective-critique sessions")
    service = SessionService(SessionStore(data_dir), backend)
    app.state.service = service

    @app.exception_handler(SessionError)
    async def session_error_handler(request: Request, exc: SessionError):
        return JSONResponse(
            status_code=_http_status(exc),
            content={"code": exc.code, "message": str(exc), "detail": type(exc).__name__},
        )

    @app.exception_handler(CriticsError)
    async def critics_error_handler(request: Request, exc: CriticsError):
        return JSONResponse(
            status_code=422,
            content={"code": "invalid_input", "message": str(exc), "detail": type(exc).__name__},
        )

    @app.post("/sessions", status_code=201)
    async def create_session(payload: dict):
        stage = payload.get("stage", "plan")
        if stage not in ("plan", "text"):
            raise ValidationError(f"unknown stage {stage!r}")
        raw_subject = payload.get("subject", "")
        if not isinstance(raw_subject, str) or not raw_subject.strip():
            raise ValidationError("subject text is required")
        subject = parse_story_package(raw_subject) if stage == "plan" else segment_sentences(raw_subject)
        session = service.create_session(
            stage,
            _parse_config(stage, payload.get("config", {})),
            subject,
            human_leader=bool(payload.get("human_leader", False)),
            label=str(payload.get("label", "")),
        )
        return session.to_dict()

    @app.get("/sessions")
    async def list_sessions():
        return {
            "sessions": [
                {
                    "id": s.id,
                    "stage": s.stage,
                    "status": s.status,
                    "round": len(s.rounds),
                    "version": s.version,
                    "label": s.label,
                }
                for s in service.list_sessions()
            ]
        }

    @app.get("/sessions/{session_id}/state")
    async def get_state(session_id: str, since: int | None = None):
        session = service.get_state(session_id, since)
        if session is None:
            return Response(status_code=304)
        return session.to_dict()

    @app.post("/sessions/{session_id}/advance")
    async def advance(session_id: str, payload: dict | None = None):
        expected = (payload or {}).get("expected_version")
        return service.advance(session_id, expected).to_dict()

    @app.post("/sessions/{session_id}/critiques")
    async def submit_critique(session_id: str, payload: dict):
        try:
            critique = Critique.from_dict(payload["critique"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"bad critique payload: {exc}") from exc
        session = service.submit_critique(
            session_id, int(payload["round"]), critique, payload.get("expected_version")
        )
        return session.to_dict()

    @app.post("/sessions/{session_id}/leader-decision")
    async def submit_leader_decision(session_id: str, payload: dict):
        try:
            decision = LeaderDecision.from_dict(payload["decision"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"bad decision payload: {exc}") from exc
        session = service.submit_leader_decision(
            session_id, int(payload["round"]), decision, payload.get("expected_version")
        )
        return session.to_dict()

    @app.post("/sessions/{session_id}/marks")
    async def mark_round(session_id: str, payload: dict):
        try:
            mark = HumanMark(
                round=int(payload["round"]),
                edited=payload.get("edited", "pass"),
                accepted=payload.get("accepted", "unmarked"),
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"bad mark payload: {exc}") from exc
        session = service.mark_round(session_id, mark.round, mark, payload.get("expected_version"))
        return session.to_dict()

    @app.get("/sessions/{session_id}/export")
    async def export(session_id: str):
        return PlainTextResponse(service.export_text(session_id))

    @app.get("/metrics")
    async def metrics():
        sessions = [s for s in service.list_sessions() if s.status == "finalized"]
        return compute_user_metrics(sessions)

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
