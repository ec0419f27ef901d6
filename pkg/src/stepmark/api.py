"""HTTP JSON interface: student sessions, assessor review queue, KB authoring.

Thin delegation onto SessionService and the knowledge-base layer; every
non-2xx response carries {code, message, detail}. Authoring and review
endpoints require the static assessor key in `X-Assessor-Key`; student-facing
responses never reveal answers, strategies, or rule definitions.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from fastapi import Depends, FastAPI, Header, Request
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .errors import (
    BadStepCountError,
    KbFormatError,
    KbReferenceError,
    SessionNotActiveError,
    StepmarkError,
    SubmissionRejectedError,
    UnknownQuestionError,
    UnknownReviewItemError,
    UnknownSessionError,
    ValidationRejectedError,
)
from .expr import render_line
from .kb import (
    KnowledgeBase,
    load_kb,
    production_from_jsonable,
    question_from_jsonable,
    upsert_production,
    upsert_question,
)
from .sessions import (
    MAX_DECLARED_STEPS,
    MIN_DECLARED_STEPS,
    SessionService,
    assessment_to_jsonable,
)

ASSESSOR_KEY_ENV = "STEPMARK_ASSESSOR_KEY"
DATA_DIR_ENV = "STEPMARK_DATA_DIR"


@dataclass(frozen=True)
class ApiConfig:
    kb_path: Path
    data_dir: Path
    host: str = "127.0.0.1"
    port: int = 8000
    assessor_key: str | None = None  # empty/None disables assessor endpoints
    static_dir: Path | None = None


class _Forbidden(StepmarkError):
    pass


def _error_body(code: str, message: str, detail: dict | None = None) -> dict:
    return {"code": code, "message": message, "detail": detail or {}}


class CreateSessionBody(BaseModel):
    question_id: str
    declared_steps: int = Field(ge=-(10**9), le=10**9)


class StepBody(BaseModel):
    text: str


class ResolveBody(BaseModel):
    note: str


def create_app(
    kb: KnowledgeBase,
    data_dir: str | Path,
    assessor_key: str | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="stepmark", docs_url=None, redoc_url=None, openapi_url=None)
    service = SessionService(kb, data_dir)
    app.state.service = service
    app.state.assessor_key = assessor_key or ""

    def require_key(x_assessor_key: str | None = Header(default=None)) -> None:
        if not app.state.assessor_key or x_assessor_key != app.state.assessor_key:
            raise _Forbidden("assessor key missing or wrong")

    # -- error mapping ------------------------------------------------------
    def _detail(exc: Exception) -> dict:
        if isinstance(exc, SubmissionRejectedError):
            return {"offset": exc.offset}
        if isinstance(exc, ValidationRejectedError):
            return {"report": exc.report}
        if isinstance(exc, KbFormatError):
            return {"problems": exc.problems}
        return {}

    error_map: list[tuple[type, int, str]] = [
        (SubmissionRejectedError, 400, "SYNTAX_ERROR"),
        (BadStepCountError, 400, "BAD_STEP_COUNT"),
        (KbFormatError, 400, "KB_FORMAT"),
        (KbReferenceError, 400, "KB_FORMAT"),
        (_Forbidden, 403, "FORBIDDEN"),
        (UnknownQuestionError, 404, "UNKNOWN_QUESTION"),
        (UnknownSessionError, 404, "UNKNOWN_SESSION"),
        (UnknownReviewItemError, 404, "UNKNOWN_REVIEW_ITEM"),
        (SessionNotActiveError, 409, "SESSION_NOT_ACTIVE"),
        (ValidationRejectedError, 422, "VALIDATION_REJECTED"),
    ]

    def _handler(status: int, code: str):
        def handle(request: Request, exc: Exception) -> JSONResponse:
            return JSONResponse(
                status_code=status,
                content=_error_body(code, str(exc), _detail(exc)),
            )

        return handle

    for exc_type, status, code in error_map:
        app.add_exception_handler(exc_type, _handler(status, code))

    @app.exception_handler(RequestValidationError)
    def handle_schema(request: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content=_error_body(
                "BAD_REQUEST",
                "request body does not match the endpoint schema",
                {"errors": jsonable_encoder(exc.errors())},
            ),
        )

    # -- student-facing endpoints -------------------------------------------
    @app.get("/api/questions")
    def list_questions() -> list[dict]:
        return [
            {"id": q.id, "prompt": q.prompt, "max_marks": q.max_marks}
            for q in service.kb.questions
        ]

    @app.post("/api/sessions", status_code=201)
    def create_session(body: CreateSessionBody) -> dict:
        session = service.create_session(body.question_id, body.declared_steps)
        return {
            "session_id": session.id,
            "question_id": session.question_id,
            "declared_steps": session.declared_steps,
            "step_limits": {"min": MIN_DECLARED_STEPS, "max": MAX_DECLARED_STEPS},
            "premise_text": render_line(session.blackboard.premise),
        }

    @app.post("/api/sessions/{session_id}/steps")
    def submit_step(session_id: str, body: StepBody) -> dict:
        outcome = service.submit_step(session_id, body.text)
        return {
            "assessment": assessment_to_jsonable(outcome.assessment),
            "running_total": outcome.running_total,
            "may_continue": outcome.may_continue,
        }

    @app.post("/api/sessions/{session_id}/end")
    def end_session(session_id: str) -> dict:
        return service.end_session(session_id)

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        return service.snapshot(session_id)

    # -- assessor endpoints ---------------------------------------------------
    @app.get("/api/review", dependencies=[Depends(require_key)])
    def list_review(status: str | None = None, question_id: str | None = None) -> list[dict]:
        return service.list_review(status=status, question_id=question_id)

    @app.post("/api/review/{item_id}/resolve", dependencies=[Depends(require_key)])
    def resolve_review(item_id: str, body: ResolveBody) -> dict:
        return service.resolve_review(item_id, body.note)

    @app.put("/api/kb/questions/{question_id}", dependencies=[Depends(require_key)])
    def put_question(question_id: str, body: dict) -> dict:
        question = question_from_jsonable(body)
        if question.id != question_id:
            raise KbFormatError(
                [f"question: body id {question.id!r} does not match path {question_id!r}"]
            )
        new_kb = upsert_question(service.kb, question)
        service.swap_kb(new_kb)
        return {
            "ok": True,
            "kb_version": new_kb.version,
            "kb_fingerprint": new_kb.fingerprint(),
        }

    @app.put("/api/kb/productions/{production_id}", dependencies=[Depends(require_key)])
    def put_production(production_id: str, body: dict) -> dict:
        production = production_from_jsonable(body)
        if production.id != production_id:
            raise KbFormatError(
                [
                    f"production: body id {production.id!r} does not match "
                    f"path {production_id!r}"
                ]
            )
        new_kb = upsert_production(service.kb, production)
        service.swap_kb(new_kb)
        return {
            "ok": True,
            "kb_version": new_kb.version,
            "kb_fingerprint": new_kb.fingerprint(),
        }

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app


def app_from_config(config: ApiConfig) -> FastAPI:
    kb = load_kb(config.kb_path)
    key = config.assessor_key
    if key is None:
        key = os.environ.get(ASSESSOR_KEY_ENV, "")
    return create_app(
        kb, config.data_dir, assessor_key=key, static_dir=config.static_dir
    )
