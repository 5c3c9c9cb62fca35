from .lyrics import LyricsDocument, LyricsSection, parse_lyrics
from .subtitles import (
    EmptyDocument,
    MalformedTimestamp,
    SubtitleCue,
    SubtitleFormat,
    SubtitleParseResult,
    parse_subtitles,
    serialize_cues,
)

__all__ = [
    "EmptyDocument",
    "LyricsDocument",
    "LyricsSection",
    "MalformedTimestamp",
    "SubtitleCue",
    "SubtitleFormat",
    "SubtitleParseResult",
    "parse_lyrics",
    "parse_subtitles",
    "serialize_cues",
]
