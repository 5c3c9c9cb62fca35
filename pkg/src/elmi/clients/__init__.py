from .base import (
    AsrService,
    AsrWord,
    AudioHandle,
    ClientError,
    LiveModeDisabled,
    LyricsSource,
    MediaBundle,
    MediaSource,
    MissingSubtitles,
    NotFound,
    SegmentOutOfRange,
    SongQuery,
    Unavailable,
    call_with_retries,
)
from .fixtures import (
    FixtureAsrService,
    FixtureAudioHandle,
    FixtureLyricsSource,
    FixtureMediaSource,
)

__all__ = [
    "AsrService",
    "AsrWord",
    "AudioHandle",
    "ClientError",
    "ClientSet",
    "FixtureAsrService",
    "FixtureAudioHandle",
    "FixtureLyricsSource",
    "FixtureMediaSource",
    "LiveModeDisabled",
    "LyricsSource",
    "MediaBundle",
    "MediaSource",
    "MissingSubtitles",
    "NotFound",
    "SegmentOutOfRange",
    "SongQuery",
    "Unavailable",
    "build_clients",
    "call_with_retries",
]

from dataclasses import dataclass

from ..config import Config


@dataclass(frozen=True)
class ClientSet:
    lyrics: LyricsSource
    media: MediaSource
    asr: AsrService


def build_live_clients(config: Config) -> ClientSet:
    """Live third-party clients are an operator add-on, gated by ELMI_LIVE."""
    if not config.live_mode:
        raise LiveModeDisabled("set ELMI_LIVE=1 to request live clients")
    raise ClientError(
        "no live client integrations are bundled; supply your own ClientSet"
    )


def build_clients(config: Config) -> ClientSet:
    if config.live_mode:
        return build_live_clients(config)
    return ClientSet(
        lyrics=FixtureLyricsSource(config.fixtures_dir),
        media=FixtureMediaSource(config.fixtures_dir),
        asr=FixtureAsrService(),
    )
