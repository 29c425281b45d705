"""HTTP API over the engine: role-based authorization plus the job queue.

Static bearer tokens from the config file stand in for the LMS session
handshake. Long pipelines (ingest, quiz generation, eval sweeps) run as
background jobs; everything else is synchronous.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request, Response, UploadFile, Form, File
from fastapi.responses import JSONResponse

from . import serde
from .engine import TutorEngine
from .errors import (Forbidden, TutorError, Unauthenticated,
                     UnknownCourse)
from .jobs import JobQueue
from .quiz import QuizScope, ReviewState
from .store import BlobRef

_STATUS_BY_CODE = {
    "unauthenticated": 401,
    "forbidden": 403,
    "forbidden_role": 403,
    "not_found": 404,
    "unknown_course": 404,
    "unknown_quiz": 404,
    "unknown_job": 404,
    "version_conflict": 409,
    "illegal_transition": 409,
    "quiz_not_published": 409,
    "not_approved": 409,
    "queue_full": 429,
    "too_large": 413,
    "provider_unavailable": 502,
    "judge_unavailable": 502,
}


@dataclass(frozen=True)
class Principal:
    user_id: str
    role: str  # teacher | student | admin
    course_memberships: tuple[str, ...]
    token: str


@dataclass
class GatewayConfig:
    tokens: dict[str, dict] = field(default_factory=dict)
    listen_host: str = "127.0.0.1"
    listen_port: int = 8080
    workers: int = 4
    queue_capacity: int = 256
    data_dir: str = "./data"
    quiz_generation_by_students: bool = False
    embedding_provider: str = "deterministic_test"
    embedding_endpoint: str = ""
    generation_provider: str = "deterministic_stub"
    generation_endpoint: str = ""


def load_config(path: str | Path | None = None, env=os.environ) -> GatewayConfig:
    """Config file (JSON) plus environment overrides."""
    data = {}
    if path is not None:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    cfg = GatewayConfig(**data)
    if "TUTOR_LISTEN_HOST" in env:
        cfg.listen_host = env["TUTOR_LISTEN_HOST"]
    if "TUTOR_LISTEN_PORT" in env:
        cfg.listen_port = int(env["TUTOR_LISTEN_PORT"])
    if "TUTOR_WORKERS" in env:
        cfg.workers = int(env["TUTOR_WORKERS"])
    if "TUTOR_DATA_DIR" in env:
        cfg.data_dir = env["TUTOR_DATA_DIR"]
    if "TUTOR_EMBEDDING_ENDPOINT" in env:
        cfg.embedding_endpoint = env["TUTOR_EMBEDDING_ENDPOINT"]
    if "TUTOR_GENERATION_ENDPOINT" in env:
        cfg.generation_endpoint = env["TUTOR_GENERATION_ENDPOINT"]
    return cfg


def authorize(request: Request, config: GatewayConfig,
              required_role: str | None = None,
              course_id: str | None = None) -> Principal:
    """Resolve the bearer token; admin passes all role and membership checks."""
    header = request.headers.get("authorization", "")
    if not header.lower().startswith("bearer "):
        raise Unauthenticated("missing bearer token")
    token = header[7:].strip()
    entry = config.tokens.get(token)
    if entry is None:
        raise Unauthenticated("unknown token")
    principal = Principal(
        user_id=entry["user_id"],
        role=entry["role"],
        course_memberships=tuple(entry.get("courses", ())),
        token=token,
    )
    if principal.role == "admin":
        return principal
    if required_role is not None and principal.role != required_role:
        raise Forbidden(f"route requires role {required_role}")
    if course_id is not None and course_id not in principal.course_memberships:
        raise Forbidden(f"not a member of course {course_id}")
    return principal


def create_app(engine: TutorEngine, config: GatewayConfig,
               queue: JobQueue | None = None) -> FastAPI:
    app = FastAPI(title="coursetutor gateway")
    queue = queue or JobQueue(engine.store, workers=config.workers,
                              capacity=config.queue_capacity)
    app.state.engine = engine
    app.state.queue = queue
    app.state.config = config

    def _ingest_handler(payload: dict) -> dict:
        ref = BlobRef(**payload["blob"])
        raw = engine.blobs.get_blob(ref)
        return engine.ingest_material(payload["course_id"], raw,
                                      payload["format"], payload["title"])

    def _quiz_handler(payload: dict) -> dict:
        scope = QuizScope(payload["scope"]["kind"],
                          payload["scope"].get("topic", ""),
                          tuple(payload["scope"].get("document_ids", ())))
        quiz = engine.generate_quiz(payload["course_id"], scope,
                                    payload["n_questions"],
                                    payload.get("kinds"),
                                    created_by=payload.get("created_by", ""))
        return {"quiz_id": quiz.quiz_id, "question_count": len(quiz.questions),
                "shortfall": quiz.shortfall}

    def _sweep_handler(payload: dict) -> dict:
        from .evalsuite.sweep import run_sweep_from_payload
        return run_sweep_from_payload(engine, payload)

    queue.register_handler("ingest", _ingest_handler)
    queue.register_handler("quiz_generation", _quiz_handler)
    queue.register_handler("eval_sweep", _sweep_handler)

    @app.exception_handler(TutorError)
    async def tutor_error_handler(request, exc: TutorError):
        status = _STATUS_BY_CODE.get(exc.code, 400)
        return JSONResponse(status_code=status, content=exc.as_dict())

    # --- courses ----------------------------------------------------------

    @app.post("/courses")
    async def create_course(request: Request):
        authorize(request, config, required_role="teacher")
        body = await request.json()
        course_id = engine.create_course(body["name"],
                                         body.get("discipline", "stem"),
                                         body.get("course_id"))
        return {"course_id": course_id}

    @app.post("/courses/{course_id}/materials")
    async def upload_material(course_id: str, request: Request,
                              file: UploadFile = File(...),
                              format: str = Form(...),
                              title: str = Form("untitled")):
        principal = authorize(request, config, required_role="teacher",
                              course_id=course_id)
        if not engine.course_exists(course_id):
            raise UnknownCourse(f"no course {course_id!r}")
        raw = await file.read()
        ref = engine.blobs.put_blob(course_id, raw,
                                    file.content_type or "application/octet-stream")
        job_id = queue.enqueue("ingest", {
            "course_id": course_id, "format": format, "title": title,
            "blob": {"blob_id": ref.blob_id, "course_id": ref.course_id,
                     "content_type": ref.content_type,
                     "size_bytes": ref.size_bytes, "checksum": ref.checksum},
            "uploaded_by": principal.user_id,
        }, course_id=course_id)
        return {"job_id": job_id}

    @app.get("/jobs/{job_id}")
    async def get_job(job_id: str, request: Request):
        authorize(request, config)
        return queue.poll(job_id).as_dict()

    # --- chat -------------------------------------------------------------

    @app.post("/courses/{course_id}/chat")
    async def chat(course_id: str, request: Request):
        principal = authorize(request, config, course_id=course_id)
        body = await request.json()
        turn = engine.answer_question(
            course_id,
            session_id=body.get("session_id", f"{principal.user_id}-default"),
            user_id=principal.user_id,
            prompt=body.get("prompt", ""),
            mode=body.get("mode", "quick"),
        )
        return serde.turn_to_dict(turn)

    @app.get("/courses/{course_id}/sessions/{session_id}/turns")
    async def list_turns(course_id: str, session_id: str, request: Request,
                         page: int = 1, page_size: int = 50):
        authorize(request, config, course_id=course_id)
        turns = engine.list_turns(course_id, session_id)
        start = (page - 1) * page_size
        return {"turns": [serde.turn_to_dict(t) for t in turns[start:start + page_size]],
                "total": len(turns)}

    # --- quizzes ----------------------------------------------------------

    @app.post("/courses/{course_id}/quizzes:generate")
    async def generate_quiz(course_id: str, request: Request):
        principal = authorize(request, config, course_id=course_id)
        if principal.role == "student" and not config.quiz_generation_by_students:
            raise Forbidden("quiz generation by students is disabled for this course")
        body = await request.json()
        scope = body.get("scope", {"kind": "whole_course"})
        job_id = queue.enqueue("quiz_generation", {
            "course_id": course_id, "scope": scope,
            "n_questions": body.get("n_questions", 5),
            "kinds": body.get("kinds"), "created_by": principal.user_id,
        }, course_id=course_id)
        return {"job_id": job_id}

    def _require(principal: Principal, role: str | None = None,
                 course_id: str | None = None) -> None:
        if principal.role == "admin":
            return
        if role is not None and principal.role != role:
            raise Forbidden(f"route requires role {role}")
        if course_id is not None and course_id not in principal.course_memberships:
            raise Forbidden(f"not a member of course {course_id}")

    @app.get("/quizzes/{quiz_id}")
    async def get_quiz(quiz_id: str, request: Request):
        principal = authorize(request, config)
        quiz = engine.get_quiz(quiz_id)
        _require(principal, course_id=quiz.course_id)
        if principal.role == "student" and quiz.review_state is not ReviewState.published:
            raise Forbidden("quiz is not published")
        return serde.quiz_to_dict(quiz)

    @app.post("/quizzes/{quiz_id}/review")
    async def review_quiz(quiz_id: str, request: Request):
        principal = authorize(request, config)
        quiz = engine.get_quiz(quiz_id)
        _require(principal, role="teacher", course_id=quiz.course_id)
        body = await request.json()
        edited = None
        if body.get("payload") is not None:
            edited = [serde.question_from_dict(q)
                      for q in body["payload"].get("questions", [])]
        quiz = engine.review_quiz(quiz_id, body["action"], principal.user_id,
                                  principal.role, edited,
                                  body.get("revision"))
        return serde.quiz_to_dict(quiz)

    @app.get("/quizzes/{quiz_id}/export.xml")
    async def export_quiz(quiz_id: str, request: Request):
        principal = authorize(request, config)
        quiz = engine.get_quiz(quiz_id)
        _require(principal, role="teacher", course_id=quiz.course_id)
        data = engine.export_quiz(quiz_id)
        return Response(content=data, media_type="application/xml")

    @app.post("/quizzes/{quiz_id}/attempts")
    async def attempt_quiz(quiz_id: str, request: Request):
        principal = authorize(request, config)
        quiz = engine.get_quiz(quiz_id)
        _require(principal, course_id=quiz.course_id)
        body = await request.json()
        attempt = engine.attempt_quiz(quiz_id, body.get("answers", {}),
                                      principal.user_id)
        return {
            "attempt_id": attempt.attempt_id, "quiz_id": quiz_id,
            "score": attempt.score,
            "per_question": {
                qid: {"correct": info["correct"],
                      "explanation": info["explanation"],
                      "citations": [serde.citation_to_dict(c)
                                    for c in info["citations"]]}
                for qid, info in attempt.per_question.items()},
        }

    # --- progress and logs ------------------------------------------------

    @app.get("/courses/{course_id}/progress")
    async def course_progress(course_id: str, request: Request,
                              user_id: str | None = None):
        principal = authorize(request, config, course_id=course_id)
        if user_id is not None and user_id != principal.user_id \
                and principal.role == "student":
            raise Forbidden("students may only view their own progress")
        return engine.course_progress(user_id or principal.user_id, course_id)

    @app.get("/courses/{course_id}/logs")
    async def course_logs(course_id: str, request: Request):
        authorize(request, config, required_role="teacher", course_id=course_id)
        return engine.course_logs(course_id)

    # --- admin ------------------------------------------------------------

    @app.post("/eval/sweep")
    async def eval_sweep(request: Request):
        authorize(request, config, required_role="admin")
        body = await request.json()
        job_id = queue.enqueue("eval_sweep", body)
        return {"job_id": job_id}

    @app.post("/admin/intent/reload")
    async def reload_intent(request: Request):
        authorize(request, config, required_role="admin")
        body = await request.json() if int(request.headers.get("content-length", 0)) else None
        if body:
            from .intent import IntentLabel
            engine.reload_intent_exemplars(
                {IntentLabel(k): list(v) for k, v in body.items()})
        else:
            engine.reload_intent_exemplars(None)
        return {"status": "reloaded"}

    return app
