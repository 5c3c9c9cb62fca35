"""REST service: project lifecycle, glossing, chat, playback, analytics."""

from __future__ import annotations

import json
import uuid
from pathlib import Path
from typing import Any, Callable, Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel, Field

from ..chat import Busy, ChatEngine, Intent, NotNoteworthy, NotReady, ThreadOpener
from ..clients import ClientSet, NotFound
from ..core import (
    MediaRefs,
    Proficiency,
    ProjectStatus,
    SignLanguage,
    SongProject,
    UnbalancedBracket,
    UserProfile,
)
from ..llm import ChatProvider
from ..store import ConflictingVersion, NotFoundError, Store, ThreadExists
from .analytics import project_analytics
from .jobs import JobManager
from .playback import PlayMode, resolve_playback

__all__ = ["create_app"]


class CreateProjectBody(BaseModel):
    title: str = Field(min_length=1)
    artist: str = Field(min_length=1)
    sign_language: SignLanguage = SignLanguage.ASL
    nickname: str = Field(min_length=1)
    proficiency: Proficiency = Proficiency.MODERATE


class GlossBody(BaseModel):
    raw: str
    expected_version: int = Field(ge=0)


class ThreadBody(BaseModel):
    proactive: bool = False


class MessageBody(BaseModel):
    text: Optional[str] = None
    shortcut_intent: Optional[Intent] = None


def _error(status: int, code: str, message: str, details: Any = None) -> JSONResponse:
    return JSONResponse(
        {"code": code, "message": message, "details": details}, status_code=status
    )


def _project_payload(store: Store, project: SongProject) -> dict:
    return {
        "id": project.id,
        "title": project.title,
        "artist": project.artist,
        "sign_language": project.sign_language.value,
        "nickname": project.user_profile.nickname,
        "proficiency": project.user_profile.proficiency.value,
        "status": project.status.value,
        "song_description": project.song_description,
        "video_url": store.project_video_url(project.id),
        "jobs": [j.to_dict() for j in store.jobs_for_project(project.id)],
    }


def _message_payload(message) -> dict:
    return message.to_dict()


def _thread_payload(thread) -> dict:
    return {
        "id": thread.id,
        "project_id": thread.project_id,
        "line_index": thread.line_index,
        "opened_by": thread.opened_by.value,
        "messages": [_message_payload(m) for m in thread.messages],
    }


def create_app(
    store: Store,
    clients: ClientSet,
    provider: ChatProvider,
    static_dir: Optional[Path] = None,
) -> FastAPI:
    app = FastAPI(title="elmi", version="0.1.0")
    engine = ChatEngine(store, provider)
    jobs = JobManager(store, clients, provider)
    app.state.store = store
    app.state.engine = engine
    app.state.jobs = jobs

    # -- error surface -------------------------------------------------------

    @app.exception_handler(RequestValidationError)
    async def on_validation(request: Request, exc: RequestValidationError):
        return _error(400, "validation", "invalid request", exc.errors())

    @app.exception_handler(NotFoundError)
    async def on_not_found(request: Request, exc: NotFoundError):
        return _error(404, "not_found", str(exc))

    @app.exception_handler(NotFound)
    async def on_client_not_found(request: Request, exc: NotFound):
        return _error(404, "not_found", str(exc))

    @app.exception_handler(ConflictingVersion)
    async def on_conflict(request: Request, exc: ConflictingVersion):
        return _error(409, "version_conflict", str(exc))

    @app.exception_handler(ThreadExists)
    async def on_thread_exists(request: Request, exc: ThreadExists):
        return _error(409, "thread_exists", "a thread already exists for this line")

    @app.exception_handler(Busy)
    async def on_busy(request: Request, exc: Busy):
        return _error(423, "busy", "a turn is already in flight for this thread")

    @app.exception_handler(NotReady)
    async def on_not_ready(request: Request, exc: NotReady):
        return _error(503, "not_ready", str(exc))

    @app.exception_handler(NotNoteworthy)
    async def on_not_noteworthy(request: Request, exc: NotNoteworthy):
        return _error(400, "not_noteworthy", str(exc))

    @app.exception_handler(UnbalancedBracket)
    async def on_malformed_gloss(request: Request, exc: UnbalancedBracket):
        return _error(
            400,
            "malformed_gloss",
            str(exc),
            {"opener": exc.opener, "offset": exc.offset},
        )

    # -- idempotency ----------------------------------------------------------

    def idempotent(request: Request, compute: Callable[[], tuple[dict, int]]):
        key = request.headers.get("Idempotency-Key")
        scoped = f"{request.method}:{request.url.path}:{key}" if key else None
        if scoped:
            cached = store.idempotent_response(scoped)
            if cached is not None:
                return JSONResponse(cached["body"], status_code=cached["status"])
        body, status = compute()
        if scoped:
            store.save_idempotent_response(scoped, {"body": body, "status": status})
        return JSONResponse(body, status_code=status)

    # -- projects ----------------------------------------------------------------

    @app.post("/projects")
    def create_project(body: CreateProjectBody, request: Request):
        def compute():
            project = SongProject(
                id=uuid.uuid4().hex[:12],
                title=body.title,
                artist=body.artist,
                sign_language=body.sign_language,
                user_profile=UserProfile(body.nickname, body.proficiency),
                media=MediaRefs(),
                status=ProjectStatus.CREATED,
            )
            store.save_project(project)
            jobs.submit(project.id)
            return _project_payload(store, store.load_project(project.id)), 201

        return idempotent(request, compute)

    @app.get("/projects/{project_id}")
    def get_project(project_id: str):
        return _project_payload(store, store.load_project(project_id))

    @app.get("/projects/{project_id}/lines")
    def get_lines(project_id: str):
        store.load_project(project_id)
        try:
            timed = store.load_timed_lyric(project_id)
        except NotFoundError:
            raise NotReady("timed lyrics are not ready yet")
        annotations = {a.line_index: a for a in store.load_annotations(project_id)}
        glosses = store.latest_glosses(project_id)
        try:
            noteworthy = engine.noteworthy_lines(project_id)
        except NotReady:
            noteworthy = set()
        lines = []
        for line in timed.lines:
            annotation = annotations.get(line.index)
            gloss = glosses.get(line.index)
            lines.append(
                {
                    "index": line.index,
                    "section": line.section,
                    "text": line.text,
                    "span": list(line.span) if line.span else None,
                    "words": [
                        {
                            "surface": w.surface,
                            "start_ms": w.start_ms,
                            "duration_ms": w.duration_ms,
                            "confidence": w.confidence,
                            "matched": w.matched,
                        }
                        for w in line.words
                    ],
                    "annotation": annotation.to_dict() if annotation else None,
                    "noteworthy": line.index in noteworthy,
                    "gloss": (
                        {"raw": gloss.raw, "version": gloss.version} if gloss else None
                    ),
                }
            )
        return {"project_id": project_id, "lines": lines}

    # -- glossing -------------------------------------------------------------------

    @app.put("/projects/{project_id}/lines/{line_index}/gloss")
    def put_gloss(project_id: str, line_index: int, body: GlossBody, request: Request):
        store.load_project(project_id)

        def compute():
            gloss = store.append_gloss(
                project_id, line_index, body.raw, body.expected_version
            )
            return (
                {
                    "line_index": gloss.line_index,
                    "raw": gloss.raw,
                    "version": gloss.version,
                    "authored_at": gloss.authored_at,
                },
                200,
            )

        return idempotent(request, compute)

    @app.get("/projects/{project_id}/lines/{line_index}/suggestions")
    def get_suggestions(project_id: str, line_index: int, partial: str = ""):
        suggestions = engine.suggest_inline(project_id, line_index, partial)
        return {"line_index": line_index, "suggestions": suggestions}

    # -- chat --------------------------------------------------------------------------

    @app.post("/projects/{project_id}/lines/{line_index}/thread")
    def open_thread(project_id: str, line_index: int, body: ThreadBody, request: Request):
        store.load_project(project_id)

        def compute():
            thread = engine.open_thread(project_id, line_index, body.proactive)
            return _thread_payload(thread), 201

        return idempotent(request, compute)

    @app.get("/projects/{project_id}/threads")
    def list_threads(project_id: str):
        store.load_project(project_id)
        return {"threads": engine.thread_summaries(project_id)}

    @app.get("/threads/{thread_id}")
    def get_thread(thread_id: str):
        return _thread_payload(store.load_thread(thread_id))

    @app.post("/threads/{thread_id}/messages")
    def post_message(thread_id: str, body: MessageBody, request: Request):
        if (body.text is None) == (body.shortcut_intent is None):
            return _error(
                400, "validation", "provide exactly one of text or shortcut_intent"
            )

        def compute():
            result = engine.handle_turn(
                thread_id, text=body.text, shortcut_intent=body.shortcut_intent
            )
            return (
                {
                    "message": _message_payload(result.message),
                    "intent": result.intent.value,
                    "classifier_fallback": result.classifier_fallback,
                    "retryable": result.retryable,
                },
                200,
            )

        return idempotent(request, compute)

    # -- playback and analytics -----------------------------------------------------------

    @app.get("/projects/{project_id}/playback")
    def get_playback(
        project_id: str,
        t: int,
        mode: PlayMode = PlayMode.GLOBAL,
        loop: Optional[int] = None,
    ):
        store.load_project(project_id)
        try:
            timed = store.load_timed_lyric(project_id)
        except NotFoundError:
            raise NotReady("timed lyrics are not ready yet")
        if mode is PlayMode.LINE_LOOP and loop is None:
            return _error(400, "validation", "line_loop mode requires loop=")
        return resolve_playback(project_id, timed, t, mode, loop).to_dict()

    @app.get("/projects/{project_id}/analytics")
    def get_analytics(project_id: str):
        store.load_project(project_id)
        return project_analytics(store, project_id)

    @app.get("/projects/{project_id}/export")
    def get_export(project_id: str):
        return store.export_bundle(project_id)

    # -- events (SSE) ------------------------------------------------------------------------

    @app.get("/projects/{project_id}/events")
    def get_events(project_id: str, timeout_s: float = 30.0):
        store.load_project(project_id)

        def stream():
            emitted = False
            for event_type, payload in jobs.events.follow(project_id, timeout_s):
                emitted = True
                yield f"event: {event_type}\ndata: {json.dumps(payload)}\n\n"
            if not emitted:
                # late subscriber after a pipeline run in another process:
                # replay the persisted job table once
                for record in store.jobs_for_project(project_id):
                    yield f"event: job_status\ndata: {json.dumps(record.to_dict())}\n\n"

        return StreamingResponse(stream(), media_type="text/event-stream")

    # -- static frontend (optional) --------------------------------------------------------------

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/app", StaticFiles(directory=str(static_dir), html=True), name="app")

    return app
