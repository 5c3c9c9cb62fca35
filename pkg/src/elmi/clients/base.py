"""Client contracts for the three external dependencies.

Implementations must be shareable across concurrent requests: stateless or
internally synchronized.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Protocol, TypeVar

from ..textsources import LyricsDocument, SubtitleFormat

__all__ = [
    "SongQuery",
    "AsrWord",
    "MediaBundle",
    "AudioHandle",
    "LyricsSource",
    "MediaSource",
    "AsrService",
    "ClientError",
    "NotFound",
    "Unavailable",
    "MissingSubtitles",
    "LiveModeDisabled",
    "SegmentOutOfRange",
    "call_with_retries",
]


class ClientError(Exception):
    pass


class NotFound(ClientError):
    pass


class Unavailable(ClientError):
    """Transient provider failure; safe to retry."""


class MissingSubtitles(ClientError):
    """The song exists but has no subtitle track."""


class LiveModeDisabled(ClientError):
    """Live third-party calls requested while ELMI_LIVE is off."""


class SegmentOutOfRange(ClientError):
    pass


@dataclass(frozen=True)
class SongQuery:
    title: str
    artist: str

    def __post_init__(self) -> None:
        if not self.title or not self.artist:
            raise ValueError("title and artist must be non-empty")


@dataclass(frozen=True)
class AsrWord:
    """A transcribed word, timed relative to the submitted segment."""

    surface: str
    start_ms: int
    duration_ms: int

    def __post_init__(self) -> None:
        if self.start_ms < 0 or self.duration_ms < 0:
            raise ValueError("AsrWord times must be non-negative")


class AudioHandle(Protocol):
    @property
    def duration_ms(self) -> int: ...

    def extract_segment(self, start_ms: int, end_ms: int) -> bytes: ...


@dataclass(frozen=True)
class MediaBundle:
    subtitle_data: bytes
    subtitle_format: SubtitleFormat
    audio: AudioHandle
    video_url: str


class LyricsSource(Protocol):
    def fetch(self, query: SongQuery) -> tuple[LyricsDocument, str]:
        """Reference lyrics plus a prose song description."""
        ...


class MediaSource(Protocol):
    def fetch(self, query: SongQuery) -> MediaBundle: ...


class AsrService(Protocol):
    def transcribe_segment(
        self, audio: AudioHandle, start_ms: int, end_ms: int
    ) -> list[AsrWord]:
        """Word timestamps relative to the segment start."""
        ...


T = TypeVar("T")


def call_with_retries(
    fn: Callable[[], T],
    attempts: int = 3,
    base_delay_ms: int = 250,
    sleep: Callable[[float], None] | None = None,
) -> T:
    """Retry ``fn`` on Unavailable only: 3 attempts, exponential backoff."""
    if sleep is None:
        import time

        sleep = time.sleep
    last: Unavailable | None = None
    for attempt in range(attempts):
        try:
            return fn()
        except Unavailable as exc:
            last = exc
            if attempt + 1 < attempts:
                sleep(base_delay_ms * (2**attempt) / 1000.0)
    assert last is not None
    raise last
