"""Background jobs: alignment then preprocessing, one job per project.

Job progress is persisted in the store and also published to an in-process
event bus that feeds the server-sent event stream, so fast pipelines still
emit every stage transition.
"""

from __future__ import annotations

import logging
import threading
import time
from typing import TYPE_CHECKING, Iterator, Optional

from ..alignment import build_timed_lyrics, make_llm_fallback
from ..analysis import PreprocessFailed, run_preprocess
from ..clients import ClientSet
from ..core import ProjectStatus
from ..llm import ChatProvider

if TYPE_CHECKING:
    from ..store import Store

logger = logging.getLogger(__name__)

__all__ = [
    "EventBus",
    "JobManager",
    "run_alignment_job",
    "run_preprocess_job",
    "run_full_pipeline",
]


class EventBus:
    """Per-project append-only event log with blocking follow."""

    def __init__(self) -> None:
        self._events: dict[str, list[tuple[str, dict]]] = {}
        self._condition = threading.Condition()

    def publish(self, project_id: str, event_type: str, payload: dict) -> None:
        with self._condition:
            self._events.setdefault(project_id, []).append((event_type, payload))
            self._condition.notify_all()

    def follow(
        self, project_id: str, timeout_s: float = 30.0
    ) -> Iterator[tuple[str, dict]]:
        """Replay existing events, then follow until the pipeline is terminal."""
        position = 0
        deadline = time.monotonic() + timeout_s
        terminal: set[str] = set()
        while time.monotonic() < deadline:
            with self._condition:
                events = self._events.get(project_id, [])
                fresh = events[position:]
                position = len(events)
                if not fresh:
                    self._condition.wait(timeout=0.1)
                    continue
            for event_type, payload in fresh:
                yield event_type, payload
                if event_type == "job_status" and payload.get("status") in (
                    "done",
                    "failed",
                ):
                    terminal.add(payload["kind"])
                    if payload["status"] == "failed" or terminal >= {
                        "alignment",
                        "preprocess",
                    }:
                        return


def _publish_job(events: Optional[EventBus], store: "Store", project_id: str, kind: str) -> None:
    if events is None:
        return
    record = store.get_job(project_id, kind)
    if record is not None:
        events.publish(project_id, "job_status", record.to_dict())


def run_alignment_job(
    store: "Store",
    clients: ClientSet,
    project_id: str,
    events: Optional[EventBus] = None,
    **kwargs,
) -> None:
    """Alignment with job bookkeeping; raises on failure after recording it."""
    project = store.load_project(project_id)
    store.start_job(project_id, "alignment")
    store.update_job(project_id, "alignment", "running")
    _publish_job(events, store, project_id, "alignment")
    if project.status in (ProjectStatus.CREATED, ProjectStatus.READY, ProjectStatus.FAILED):
        store.update_project_status(project_id, ProjectStatus.PREPROCESSING)
        project = store.load_project(project_id)
    try:
        build_timed_lyrics(project, clients, store=store, **kwargs)
    except Exception as exc:
        store.update_job(project_id, "alignment", "failed", error=str(exc))
        _publish_job(events, store, project_id, "alignment")
        raise
    store.update_job(project_id, "alignment", "done")
    _publish_job(events, store, project_id, "alignment")


def run_preprocess_job(
    store: "Store",
    provider: ChatProvider,
    project_id: str,
    batch_size: int = 10,
    events: Optional[EventBus] = None,
) -> None:
    store.start_job(project_id, "preprocess")
    store.update_job(project_id, "preprocess", "running")
    _publish_job(events, store, project_id, "preprocess")

    def on_stage_done(stage: str) -> None:
        store.update_job(project_id, "preprocess", "running", stage=stage)
        if events is not None:
            events.publish(
                project_id, "stage_done", {"project_id": project_id, "stage": stage}
            )

    try:
        run_preprocess(store, provider, project_id, batch_size, on_stage_done)
    except PreprocessFailed as exc:
        store.update_job(project_id, "preprocess", "failed", stage=exc.stage, error=str(exc))
        _publish_job(events, store, project_id, "preprocess")
        raise
    except Exception as exc:
        store.update_job(project_id, "preprocess", "failed", error=str(exc))
        _publish_job(events, store, project_id, "preprocess")
        raise
    store.update_job(project_id, "preprocess", "done")
    _publish_job(events, store, project_id, "preprocess")


def run_full_pipeline(
    store: "Store",
    clients: ClientSet,
    provider: ChatProvider,
    project_id: str,
    events: Optional[EventBus] = None,
    **kwargs,
) -> None:
    kwargs.setdefault("llm_fallback", make_llm_fallback(provider))
    run_alignment_job(store, clients, project_id, events, **kwargs)
    run_preprocess_job(store, provider, project_id, events=events)


class JobManager:
    """At most one background job chain per project at a time."""

    def __init__(self, store: "Store", clients: ClientSet, provider: ChatProvider):
        self.store = store
        self.clients = clients
        self.provider = provider
        self.events = EventBus()
        self._active: dict[str, threading.Thread] = {}
        self._lock = threading.Lock()

    def is_busy(self, project_id: str) -> bool:
        with self._lock:
            worker = self._active.get(project_id)
            return worker is not None and worker.is_alive()

    def submit(self, project_id: str) -> bool:
        """Start the alignment+preprocess chain; False when one is running."""
        with self._lock:
            worker = self._active.get(project_id)
            if worker is not None and worker.is_alive():
                return False

            def target() -> None:
                try:
                    run_full_pipeline(
                        self.store, self.clients, self.provider, project_id, self.events
                    )
                except Exception:
                    logger.exception("background pipeline failed for %s", project_id)

            thread = threading.Thread(target=target, daemon=True, name=f"job-{project_id}")
            self._active[project_id] = thread
            thread.start()
            return True

    def wait(self, project_id: str, timeout: Optional[float] = None) -> None:
        with self._lock:
            worker = self._active.get(project_id)
        if worker is not None:
            worker.join(timeout)
