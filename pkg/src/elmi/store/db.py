"""Embedded SQLite persistence for all aggregates.

Single-writer/multi-reader: every write runs inside one transaction under
a process-wide lock, so a killed process never leaves a partially visible
aggregate. Schema migrations are forward-only.
"""

from __future__ import annotations

import json
import sqlite3
import threading
import uuid
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterator, Optional

from ..analysis.models import LineAnnotation
from ..chat.models import ChatMessage, ChatThread, Intent, MessageOrigin, MessageRole, ThreadOpener
from ..core import (
    GlossLine,
    LyricLine,
    MediaRefs,
    Proficiency,
    ProjectStatus,
    SignLanguage,
    SongProject,
    TimedLyric,
    TimedWord,
    UserProfile,
    check_status_transition,
    tokenize_gloss,
)

__all__ = [
    "Store",
    "NotFoundError",
    "ConflictingVersion",
    "ThreadExists",
    "JobRecord",
    "now_rfc3339",
]


class NotFoundError(KeyError):
    pass


class ConflictingVersion(Exception):
    """Optimistic-concurrency failure: the expected gloss version is stale."""


class ThreadExists(Exception):
    pass


def now_rfc3339() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds").replace(
        "+00:00", "Z"
    )


_MIGRATIONS = [
    """
    CREATE TABLE projects (
        id TEXT PRIMARY KEY,
        title TEXT NOT NULL,
        artist TEXT NOT NULL,
        sign_language TEXT NOT NULL,
        nickname TEXT NOT NULL,
        proficiency TEXT NOT NULL,
        status TEXT NOT NULL,
        song_description TEXT NOT NULL DEFAULT '',
        lyrics_key TEXT NOT NULL DEFAULT '',
        subtitle_key TEXT NOT NULL DEFAULT '',
        audio_key TEXT NOT NULL DEFAULT '',
        created_at TEXT NOT NULL
    );
    CREATE TABLE timed_lyrics (
        project_id TEXT PRIMARY KEY REFERENCES projects(id),
        payload TEXT NOT NULL
    );
    CREATE TABLE alignment_reports (
        project_id TEXT PRIMARY KEY REFERENCES projects(id),
        payload TEXT NOT NULL
    );
    CREATE TABLE gloss_lines (
        project_id TEXT NOT NULL,
        line_index INTEGER NOT NULL,
        version INTEGER NOT NULL,
        raw TEXT NOT NULL,
        authored_at TEXT NOT NULL,
        PRIMARY KEY (project_id, line_index, version)
    );
    CREATE TABLE annotations (
        project_id TEXT NOT NULL,
        line_index INTEGER NOT NULL,
        payload TEXT NOT NULL,
        PRIMARY KEY (project_id, line_index)
    );
    CREATE TABLE stage_artifacts (
        project_id TEXT NOT NULL,
        stage TEXT NOT NULL,
        input_hash TEXT NOT NULL,
        payload TEXT NOT NULL,
        PRIMARY KEY (project_id, stage)
    );
    CREATE TABLE threads (
        id TEXT PRIMARY KEY,
        project_id TEXT NOT NULL,
        line_index INTEGER NOT NULL,
        opened_by TEXT NOT NULL,
        UNIQUE (project_id, line_index)
    );
    CREATE TABLE messages (
        thread_id TEXT NOT NULL REFERENCES threads(id),
        seq INTEGER NOT NULL,
        role TEXT NOT NULL,
        text TEXT NOT NULL,
        origin TEXT NOT NULL,
        intent TEXT,
        created_at TEXT NOT NULL,
        PRIMARY KEY (thread_id, seq)
    );
    CREATE TABLE jobs (
        project_id TEXT NOT NULL,
        kind TEXT NOT NULL,
        status TEXT NOT NULL,
        stage TEXT,
        error TEXT,
        created_at TEXT NOT NULL,
        updated_at TEXT NOT NULL,
        PRIMARY KEY (project_id, kind)
    );
    CREATE TABLE idempotency (
        key TEXT PRIMARY KEY,
        payload TEXT NOT NULL
    );
    """,
    # v2: the public video URL discovered during alignment, embedded by the UI
    """
    ALTER TABLE projects ADD COLUMN video_url TEXT NOT NULL DEFAULT '';
    """,
]


class JobRecord:
    KINDS = ("alignment", "preprocess")
    STATUSES = ("pending", "running", "done", "failed")
    _TRANSITIONS = {
        "pending": {"running"},
        "running": {"done", "failed"},
        "done": set(),
        "failed": set(),
    }

    def __init__(self, project_id, kind, status, stage, error, created_at, updated_at):
        self.project_id = project_id
        self.kind = kind
        self.status = status
        self.stage = stage
        self.error = error
        self.created_at = created_at
        self.updated_at = updated_at

    def to_dict(self) -> dict[str, Any]:
        return {
            "project_id": self.project_id,
            "kind": self.kind,
            "status": self.status,
            "stage": self.stage,
            "error": self.error,
            "created_at": self.created_at,
            "updated_at": self.updated_at,
        }


class Store:
    def __init__(self, path: str | Path = ":memory:"):
        self._conn = sqlite3.connect(str(path), check_same_thread=False)
        self._conn.row_factory = sqlite3.Row
        self._conn.execute("PRAGMA foreign_keys = ON")
        if str(path) != ":memory:":
            self._conn.execute("PRAGMA journal_mode = WAL")
        self._write_lock = threading.RLock()
        self._migrate()

    def close(self) -> None:
        self._conn.close()

    def _migrate(self) -> None:
        with self._write_lock, self._conn:
            self._conn.execute(
                "CREATE TABLE IF NOT EXISTS schema_meta (version INTEGER NOT NULL)"
            )
            row = self._conn.execute("SELECT version FROM schema_meta").fetchone()
            version = row["version"] if row else 0
            for number, script in enumerate(_MIGRATIONS, start=1):
                if number > version:
                    self._conn.executescript(script)
            if row:
                self._conn.execute(
                    "UPDATE schema_meta SET version = ?", (len(_MIGRATIONS),)
                )
            else:
                self._conn.execute(
                    "INSERT INTO schema_meta (version) VALUES (?)", (len(_MIGRATIONS),)
                )

    # -- projects ------------------------------------------------------------

    def save_project(self, project: SongProject) -> None:
        with self._write_lock, self._conn:
            self._conn.execute(
                """INSERT OR REPLACE INTO projects
                   (id, title, artist, sign_language, nickname, proficiency,
                    status, song_description, lyrics_key, subtitle_key,
                    audio_key, created_at)
                   VALUES (?,?,?,?,?,?,?,?,?,?,?,?)""",
                (
                    project.id,
                    project.title,
                    project.artist,
                    project.sign_language.value,
                    project.user_profile.nickname,
                    project.user_profile.proficiency.value,
                    project.status.value,
                    project.song_description,
                    project.media.lyrics_key,
                    project.media.subtitle_key,
                    project.media.audio_key,
                    now_rfc3339(),
                ),
            )

    def load_project(self, project_id: str) -> SongProject:
        row = self._conn.execute(
            "SELECT * FROM projects WHERE id = ?", (project_id,)
        ).fetchone()
        if row is None:
            raise NotFoundError(project_id)
        return SongProject(
            id=row["id"],
            title=row["title"],
            artist=row["artist"],
            sign_language=SignLanguage(row["sign_language"]),
            user_profile=UserProfile(row["nickname"], Proficiency(row["proficiency"])),
            media=MediaRefs(row["lyrics_key"], row["subtitle_key"], row["audio_key"]),
            status=ProjectStatus(row["status"]),
            song_description=row["song_description"],
        )

    def list_projects(self) -> list[SongProject]:
        rows = self._conn.execute("SELECT id FROM projects ORDER BY created_at").fetchall()
        return [self.load_project(r["id"]) for r in rows]

    def update_project_status(self, project_id: str, new_status: ProjectStatus) -> None:
        with self._write_lock, self._conn:
            row = self._conn.execute(
                "SELECT status FROM projects WHERE id = ?", (project_id,)
            ).fetchone()
            if row is None:
                raise NotFoundError(project_id)
            check_status_transition(ProjectStatus(row["status"]), new_status)
            self._conn.execute(
                "UPDATE projects SET status = ? WHERE id = ?",
                (new_status.value, project_id),
            )

    def update_project_description(self, project_id: str, description: str) -> None:
        with self._write_lock, self._conn:
            self._conn.execute(
                "UPDATE projects SET song_description = ? WHERE id = ?",
                (description, project_id),
            )

    def update_project_video_url(self, project_id: str, video_url: str) -> None:
        with self._write_lock, self._conn:
            self._conn.execute(
                "UPDATE projects SET video_url = ? WHERE id = ?",
                (video_url, project_id),
            )

    def project_video_url(self, project_id: str) -> str:
        row = self._conn.execute(
            "SELECT video_url FROM projects WHERE id = ?", (project_id,)
        ).fetchone()
        if row is None:
            raise NotFoundError(project_id)
        return row["video_url"]

    # -- timed lyrics ----------------------------------------------------------

    def save_timed_lyric(self, project_id: str, timed: TimedLyric) -> None:
        payload = json.dumps(timed_lyric_to_dict(timed), sort_keys=True)
        with self._write_lock, self._conn:
            self._conn.execute(
                "INSERT OR REPLACE INTO timed_lyrics (project_id, payload) VALUES (?,?)",
                (project_id, payload),
            )

    def load_timed_lyric(self, project_id: str) -> TimedLyric:
        row = self._conn.execute(
            "SELECT payload FROM timed_lyrics WHERE project_id = ?", (project_id,)
        ).fetchone()
        if row is None:
            raise NotFoundError(f"timed lyric for {project_id}")
        return timed_lyric_from_dict(json.loads(row["payload"]))

    def has_timed_lyric(self, project_id: str) -> bool:
        row = self._conn.execute(
            "SELECT 1 FROM timed_lyrics WHERE project_id = ?", (project_id,)
        ).fetchone()
        return row is not None

    def save_alignment_report(self, project_id: str, report: dict[str, Any]) -> None:
        with self._write_lock, self._conn:
            self._conn.execute(
                "INSERT OR REPLACE INTO alignment_reports (project_id, payload) VALUES (?,?)",
                (project_id, json.dumps(report, sort_keys=True)),
            )

    def load_alignment_report(self, project_id: str) -> dict[str, Any]:
        row = self._conn.execute(
            "SELECT payload FROM alignment_reports WHERE project_id = ?", (project_id,)
        ).fetchone()
        if row is None:
            raise NotFoundError(f"alignment report for {project_id}")
        return json.loads(row["payload"])

    # -- glosses ---------------------------------------------------------------

    def append_gloss(
        self,
        project_id: str,
        line_index: int,
        raw: str,
        expected_version: int,
        authored_at: Optional[str] = None,
    ) -> GlossLine:
        """Append a new gloss version; the gloss must parse before persisting."""
        tokenize_gloss(raw)  # raises UnbalancedBracket on malformed input
        authored_at = authored_at or now_rfc3339()
        with self._write_lock, self._conn:
            row = self._conn.execute(
                "SELECT MAX(version) AS v FROM gloss_lines WHERE project_id = ? AND line_index = ?",
                (project_id, line_index),
            ).fetchone()
            current = row["v"] or 0
            if current != expected_version:
                raise ConflictingVersion(
                    f"line {line_index}: expected version {expected_version}, "
                    f"current is {current}"
                )
            version = current + 1
            self._conn.execute(
                "INSERT INTO gloss_lines (project_id, line_index, version, raw, authored_at)"
                " VALUES (?,?,?,?,?)",
                (project_id, line_index, version, raw, authored_at),
            )
        return GlossLine.create(line_index, raw, version, authored_at)

    def gloss_history(self, project_id: str, line_index: int) -> list[GlossLine]:
        rows = self._conn.execute(
            "SELECT * FROM gloss_lines WHERE project_id = ? AND line_index = ?"
            " ORDER BY version",
            (project_id, line_index),
        ).fetchall()
        return [
            GlossLine.create(r["line_index"], r["raw"], r["version"], r["authored_at"])
            for r in rows
        ]

    def latest_gloss(self, project_id: str, line_index: int) -> Optional[GlossLine]:
        history = self.gloss_history(project_id, line_index)
        return history[-1] if history else None

    def latest_glosses(self, project_id: str) -> dict[int, GlossLine]:
        rows = self._conn.execute(
            "SELECT line_index, MAX(version) AS v FROM gloss_lines"
            " WHERE project_id = ? GROUP BY line_index",
            (project_id,),
        ).fetchall()
        out = {}
        for r in rows:
            gloss = self.latest_gloss(project_id, r["line_index"])
            assert gloss is not None
            out[r["line_index"]] = gloss
        return out

    # -- annotations -------------------------------------------------------------

    def save_annotations(self, project_id: str, annotations: list[LineAnnotation]) -> None:
        with self._write_lock, self._conn:
            for annotation in annotations:
                self._conn.execute(
                    "INSERT OR REPLACE INTO annotations (project_id, line_index, payload)"
                    " VALUES (?,?,?)",
                    (
                        project_id,
                        annotation.line_index,
                        json.dumps(annotation.to_dict(), sort_keys=True),
                    ),
                )

    def load_annotations(self, project_id: str) -> list[LineAnnotation]:
        rows = self._conn.execute(
            "SELECT payload FROM annotations WHERE project_id = ? ORDER BY line_index",
            (project_id,),
        ).fetchall()
        return [LineAnnotation.from_dict(json.loads(r["payload"])) for r in rows]

    # -- stage artifacts -----------------------------------------------------------

    def save_stage_artifact(
        self, project_id: str, stage: str, input_hash: str, payload: Any
    ) -> None:
        with self._write_lock, self._conn:
            self._conn.execute(
                "INSERT OR REPLACE INTO stage_artifacts"
                " (project_id, stage, input_hash, payload) VALUES (?,?,?,?)",
                (project_id, stage, input_hash, json.dumps(payload, sort_keys=True)),
            )

    def load_stage_artifact(
        self, project_id: str, stage: str
    ) -> Optional[tuple[str, Any]]:
        row = self._conn.execute(
            "SELECT input_hash, payload FROM stage_artifacts"
            " WHERE project_id = ? AND stage = ?",
            (project_id, stage),
        ).fetchone()
        if row is None:
            return None
        return row["input_hash"], json.loads(row["payload"])

    def clear_stage_artifacts(self, project_id: str) -> None:
        with self._write_lock, self._conn:
            self._conn.execute(
                "DELETE FROM stage_artifacts WHERE project_id = ?", (project_id,)
            )
            self._conn.execute(
                "DELETE FROM annotations WHERE project_id = ?", (project_id,)
            )

    # -- threads and messages ---------------------------------------------------------

    def create_thread(
        self, project_id: str, line_index: int, opened_by: ThreadOpener
    ) -> ChatThread:
        thread_id = uuid.uuid4().hex
        with self._write_lock, self._conn:
            existing = self._conn.execute(
                "SELECT id FROM threads WHERE project_id = ? AND line_index = ?",
                (project_id, line_index),
            ).fetchone()
            if existing is not None:
                raise ThreadExists(existing["id"])
            self._conn.execute(
                "INSERT INTO threads (id, project_id, line_index, opened_by) VALUES (?,?,?,?)",
                (thread_id, project_id, line_index, opened_by.value),
            )
        return ChatThread(thread_id, project_id, line_index, opened_by)

    def thread_for_line(self, project_id: str, line_index: int) -> Optional[ChatThread]:
        row = self._conn.execute(
            "SELECT id FROM threads WHERE project_id = ? AND line_index = ?",
            (project_id, line_index),
        ).fetchone()
        return self.load_thread(row["id"]) if row else None

    def load_thread(self, thread_id: str) -> ChatThread:
        row = self._conn.execute(
            "SELECT * FROM threads WHERE id = ?", (thread_id,)
        ).fetchone()
        if row is None:
            raise NotFoundError(thread_id)
        messages = self._conn.execute(
            "SELECT * FROM messages WHERE thread_id = ? ORDER BY seq", (thread_id,)
        ).fetchall()
        return ChatThread(
            id=row["id"],
            project_id=row["project_id"],
            line_index=row["line_index"],
            opened_by=ThreadOpener(row["opened_by"]),
            messages=tuple(
                ChatMessage(
                    seq=m["seq"],
                    role=MessageRole(m["role"]),
                    text=m["text"],
                    origin=MessageOrigin(m["origin"]),
                    intent=Intent(m["intent"]) if m["intent"] else None,
                    created_at=m["created_at"],
                )
                for m in messages
            ),
        )

    def list_threads(self, project_id: str) -> list[ChatThread]:
        rows = self._conn.execute(
            "SELECT id FROM threads WHERE project_id = ? ORDER BY line_index",
            (project_id,),
        ).fetchall()
        return [self.load_thread(r["id"]) for r in rows]

    def append_message(
        self,
        thread_id: str,
        role: MessageRole,
        text: str,
        origin: MessageOrigin,
        intent: Optional[Intent] = None,
    ) -> ChatMessage:
        with self._write_lock, self._conn:
            row = self._conn.execute(
                "SELECT MAX(seq) AS s FROM messages WHERE thread_id = ?", (thread_id,)
            ).fetchone()
            seq = (row["s"] or 0) + 1
            created_at = now_rfc3339()
            self._conn.execute(
                "INSERT INTO messages (thread_id, seq, role, text, origin, intent, created_at)"
                " VALUES (?,?,?,?,?,?,?)",
                (
                    thread_id,
                    seq,
                    role.value,
                    text,
                    origin.value,
                    intent.value if intent else None,
                    created_at,
                ),
            )
        return ChatMessage(seq, role, text, origin, intent, created_at)

    # -- jobs -----------------------------------------------------------------------

    def start_job(self, project_id: str, kind: str) -> None:
        assert kind in JobRecord.KINDS
        now = now_rfc3339()
        with self._write_lock, self._conn:
            self._conn.execute(
                "INSERT OR REPLACE INTO jobs"
                " (project_id, kind, status, stage, error, created_at, updated_at)"
                " VALUES (?,?,?,?,?,?,?)",
                (project_id, kind, "pending", None, None, now, now),
            )

    def update_job(
        self,
        project_id: str,
        kind: str,
        status: str,
        stage: Optional[str] = None,
        error: Optional[str] = None,
    ) -> None:
        with self._write_lock, self._conn:
            row = self._conn.execute(
                "SELECT status FROM jobs WHERE project_id = ? AND kind = ?",
                (project_id, kind),
            ).fetchone()
            if row is None:
                raise NotFoundError(f"job {kind} for {project_id}")
            current = row["status"]
            if status != current and status not in JobRecord._TRANSITIONS[current]:
                raise ValueError(f"illegal job transition {current} -> {status}")
            self._conn.execute(
                "UPDATE jobs SET status = ?, stage = ?, error = ?, updated_at = ?"
                " WHERE project_id = ? AND kind = ?",
                (status, stage, error, now_rfc3339(), project_id, kind),
            )

    def get_job(self, project_id: str, kind: str) -> Optional[JobRecord]:
        row = self._conn.execute(
            "SELECT * FROM jobs WHERE project_id = ? AND kind = ?",
            (project_id, kind),
        ).fetchone()
        if row is None:
            return None
        return JobRecord(
            row["project_id"],
            row["kind"],
            row["status"],
            row["stage"],
            row["error"],
            row["created_at"],
            row["updated_at"],
        )

    def jobs_for_project(self, project_id: str) -> list[JobRecord]:
        return [
            record
            for kind in JobRecord.KINDS
            if (record := self.get_job(project_id, kind)) is not None
        ]

    # -- idempotency -------------------------------------------------------------------

    def idempotent_response(self, key: str) -> Optional[Any]:
        row = self._conn.execute(
            "SELECT payload FROM idempotency WHERE key = ?", (key,)
        ).fetchone()
        return json.loads(row["payload"]) if row else None

    def save_idempotent_response(self, key: str, payload: Any) -> None:
        with self._write_lock, self._conn:
            self._conn.execute(
                "INSERT OR REPLACE INTO idempotency (key, payload) VALUES (?,?)",
                (key, json.dumps(payload, sort_keys=True)),
            )

    # -- export ---------------------------------------------------------------------------

    def export_bundle(self, project_id: str) -> dict[str, Any]:
        """Everything known about a project, as one JSON-ready bundle."""
        project = self.load_project(project_id)
        bundle: dict[str, Any] = {
            "project": {
                "id": project.id,
                "title": project.title,
                "artist": project.artist,
                "sign_language": project.sign_language.value,
                "user_profile": {
                    "nickname": project.user_profile.nickname,
                    "proficiency": project.user_profile.proficiency.value,
                },
                "status": project.status.value,
                "song_description": project.song_description,
                "video_url": self.project_video_url(project_id),
            },
            "timed_lyric": None,
            "alignment_report": None,
            "annotations": [a.to_dict() for a in self.load_annotations(project_id)],
            "glosses": {},
            "threads": [],
            "jobs": [j.to_dict() for j in self.jobs_for_project(project_id)],
        }
        if self.has_timed_lyric(project_id):
            bundle["timed_lyric"] = timed_lyric_to_dict(self.load_timed_lyric(project_id))
        try:
            bundle["alignment_report"] = self.load_alignment_report(project_id)
        except NotFoundError:
            pass
        line_indices = [
            r["line_index"]
            for r in self._conn.execute(
                "SELECT DISTINCT line_index FROM gloss_lines WHERE project_id = ?"
                " ORDER BY line_index",
                (project_id,),
            )
        ]
        for line_index in line_indices:
            bundle["glosses"][str(line_index)] = [
                {
                    "line_index": g.line_index,
                    "raw": g.raw,
                    "version": g.version,
                    "authored_at": g.authored_at,
                }
                for g in self.gloss_history(project_id, line_index)
            ]
        for thread in self.list_threads(project_id):
            bundle["threads"].append(
                {
                    "id": thread.id,
                    "line_index": thread.line_index,
                    "opened_by": thread.opened_by.value,
                    "messages": [m.to_dict() for m in thread.messages],
                }
            )
        return bundle


# -- TimedLyric JSON mapping (shared with the export surface) ---------------------


def timed_lyric_to_dict(timed: TimedLyric) -> dict[str, Any]:
    return {
        "lines": [
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
            }
            for line in timed.lines
        ]
    }


def timed_lyric_from_dict(data: dict[str, Any]) -> TimedLyric:
    lines = []
    for entry in data["lines"]:
        lines.append(
            LyricLine(
                index=entry["index"],
                section=entry["section"],
                text=entry["text"],
                span=tuple(entry["span"]) if entry["span"] else None,
                words=tuple(
                    TimedWord(
                        surface=w["surface"],
                        start_ms=w["start_ms"],
                        duration_ms=w["duration_ms"],
                        confidence=w["confidence"],
                        matched=w["matched"],
                    )
                    for w in entry["words"]
                ),
            )
        )
    return TimedLyric(tuple(lines))
