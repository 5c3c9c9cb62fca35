"""Playback-state resolution for karaoke highlighting."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from ..core import TimedLyric

__all__ = ["PlayMode", "PlaybackState", "resolve_playback"]


class PlayMode(str, Enum):
    GLOBAL = "global"
    LINE_LOOP = "line_loop"


@dataclass(frozen=True)
class PlaybackState:
    project_id: str
    t_ms: int
    active_line: Optional[int]
    active_word: Optional[int]
    mode: PlayMode
    loop_line: Optional[int] = None

    def __post_init__(self) -> None:
        if self.mode is PlayMode.LINE_LOOP and self.loop_line is None:
            raise ValueError("line_loop mode requires loop_line")
        if self.active_word is not None and self.active_line is None:
            raise ValueError("active_word requires active_line")

    def to_dict(self) -> dict:
        return {
            "project_id": self.project_id,
            "t_ms": self.t_ms,
            "active_line": self.active_line,
            "active_word": self.active_word,
            "mode": self.mode.value,
            "loop_line": self.loop_line,
        }


def resolve_playback(
    project_id: str,
    timed: TimedLyric,
    t_ms: int,
    mode: PlayMode = PlayMode.GLOBAL,
    loop_line: Optional[int] = None,
) -> PlaybackState:
    """Pure function of (timed lyrics, t, mode, loop_line).

    Spans are half-open [start, end): at a shared boundary the later line
    wins, so a finished line never stays highlighted. The active word is
    the last word whose start is <= t. In line-loop mode t is first wrapped
    into the loop line's span.
    """
    if mode is PlayMode.LINE_LOOP:
        if loop_line is None:
            raise ValueError("line_loop mode requires loop_line")
        span = timed.line(loop_line).span
        if span is None:
            return PlaybackState(project_id, t_ms, None, None, mode, loop_line)
        start, end = span
        t_ms = (t_ms - start) % (end - start) + start

    active_line: Optional[int] = None
    for line in timed.lines:
        if line.span is None:
            continue
        start, end = line.span
        if start <= t_ms < end:
            active_line = line.index  # later lines overwrite at shared bounds
    if active_line is None:
        return PlaybackState(project_id, t_ms, None, None, mode, loop_line)

    active_word: Optional[int] = None
    for position, word in enumerate(timed.line(active_line).words):
        if word.start_ms <= t_ms:
            active_word = position
    return PlaybackState(project_id, t_ms, active_line, active_word, mode, loop_line)
