"""Domain types shared across the workbench."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional


class SignLanguage(str, Enum):
    ASL = "ASL"
    PSE = "PSE"


class Proficiency(str, Enum):
    NOVICE = "novice"
    MODERATE = "moderate"
    FLUENT = "fluent"
    NATIVE = "native"


class ProjectStatus(str, Enum):
    CREATED = "created"
    PREPROCESSING = "preprocessing"
    READY = "ready"
    FAILED = "failed"


# Forward chain created -> preprocessing -> {ready, failed}; ready and
# failed may re-enter preprocessing so a fixed job can be re-run.
_STATUS_TRANSITIONS = {
    ProjectStatus.CREATED: {ProjectStatus.PREPROCESSING},
    ProjectStatus.PREPROCESSING: {ProjectStatus.READY, ProjectStatus.FAILED},
    ProjectStatus.READY: {ProjectStatus.PREPROCESSING},
    ProjectStatus.FAILED: {ProjectStatus.PREPROCESSING},
}


def check_status_transition(old: ProjectStatus, new: ProjectStatus) -> None:
    if new not in _STATUS_TRANSITIONS[old]:
        raise ValueError(f"illegal status transition {old.value} -> {new.value}")


@dataclass(frozen=True)
class UserProfile:
    nickname: str
    proficiency: Proficiency = Proficiency.MODERATE

    def __post_init__(self) -> None:
        if not self.nickname:
            raise ValueError("nickname must be non-empty")


@dataclass(frozen=True)
class MediaRefs:
    """Keys into the configured media backend (fixture directory in tests)."""

    lyrics_key: str = ""
    subtitle_key: str = ""
    audio_key: str = ""


@dataclass(frozen=True)
class SongProject:
    id: str
    title: str
    artist: str
    sign_language: SignLanguage
    user_profile: UserProfile
    media: MediaRefs = field(default_factory=MediaRefs)
    status: ProjectStatus = ProjectStatus.CREATED
    song_description: str = ""


@dataclass(frozen=True)
class TimedWord:
    """One lyric word with timing.

    Unmatched words carry interpolated timing and zero confidence.
    """

    surface: str
    start_ms: int
    duration_ms: int
    confidence: float = 1.0
    matched: bool = True

    def __post_init__(self) -> None:
        if self.duration_ms < 0:
            raise ValueError("duration_ms must be >= 0")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must be within [0, 1]")
        if not self.matched and self.confidence != 0.0:
            raise ValueError("unmatched words must have confidence 0")

    @property
    def end_ms(self) -> int:
        return self.start_ms + self.duration_ms


@dataclass(frozen=True)
class LyricLine:
    index: int
    section: str
    text: str
    span: Optional[tuple[int, int]] = None
    words: tuple[TimedWord, ...] = ()

    def __post_init__(self) -> None:
        if self.span is not None:
            start, end = self.span
            if start >= end:
                raise ValueError(f"line {self.index}: span start must precede end")
            for word in self.words:
                if word.start_ms < start or word.end_ms > end:
                    raise ValueError(
                        f"line {self.index}: word {word.surface!r} outside line span"
                    )
        starts = [w.start_ms for w in self.words]
        if starts != sorted(starts):
            raise ValueError(f"line {self.index}: words must be ordered by start")


@dataclass(frozen=True)
class TimedLyric:
    """A full song's lyric lines with spans and per-word timestamps."""

    lines: tuple[LyricLine, ...]

    def line(self, index: int) -> LyricLine:
        return self.lines[index]
