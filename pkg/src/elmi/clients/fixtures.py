"""Deterministic fixture-backed clients.

Fixture directory layout (see docs/fixtures.md):

    <root>/<song-id>/
        meta.json        {"title", "artist", "video_url", "duration_ms"}
        lyrics.txt       reference lyrics (section headers + lines)
        description.txt  prose song description
        subs.vtt         subtitle track (or subs.srt)
        words.json       [{"surface", "start_ms", "duration_ms"}, ...]
                         times absolute to track start
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..textsources import LyricsDocument, SubtitleFormat, parse_lyrics
from .base import (
    AsrWord,
    MediaBundle,
    MissingSubtitles,
    NotFound,
    SegmentOutOfRange,
    SongQuery,
)

__all__ = [
    "FixtureAudioHandle",
    "FixtureLyricsSource",
    "FixtureMediaSource",
    "FixtureAsrService",
]


def _norm_key(title: str, artist: str) -> tuple[str, str]:
    return title.strip().lower(), artist.strip().lower()


def _iter_song_dirs(root: Path):
    for child in sorted(root.iterdir()):
        if child.is_dir() and (child / "meta.json").exists():
            yield child


def _find_song_dir(root: Path, query: SongQuery) -> tuple[Path, dict]:
    wanted = _norm_key(query.title, query.artist)
    for child in _iter_song_dirs(root):
        meta = json.loads((child / "meta.json").read_text("utf-8"))
        if _norm_key(meta.get("title", ""), meta.get("artist", "")) == wanted:
            return child, meta
    raise NotFound(f"no fixture for {query.title!r} by {query.artist!r}")


@dataclass(frozen=True)
class FixtureAudioHandle:
    """Audio stand-in: the track's absolute word timings."""

    words: tuple[AsrWord, ...]
    duration_ms: int

    def extract_segment(self, start_ms: int, end_ms: int) -> bytes:
        cropped = _crop_words(self.words, start_ms, end_ms, self.duration_ms)
        payload = [
            {"surface": w.surface, "start_ms": w.start_ms, "duration_ms": w.duration_ms}
            for w in cropped
        ]
        return json.dumps(payload, sort_keys=True).encode("utf-8")


def _crop_words(
    words: tuple[AsrWord, ...], start_ms: int, end_ms: int, duration_ms: int
) -> list[AsrWord]:
    """Words fully inside [start, end], re-based to the segment start."""
    if not (0 <= start_ms < end_ms <= duration_ms):
        raise SegmentOutOfRange(
            f"segment [{start_ms}, {end_ms}] outside track of {duration_ms} ms"
        )
    out = []
    for w in words:
        if w.start_ms >= start_ms and w.start_ms + w.duration_ms <= end_ms:
            out.append(AsrWord(w.surface, w.start_ms - start_ms, w.duration_ms))
    return out


class FixtureLyricsSource:
    def __init__(self, root: Path | str):
        self.root = Path(root)

    def fetch(self, query: SongQuery) -> tuple[LyricsDocument, str]:
        song_dir, _ = _find_song_dir(self.root, query)
        doc = parse_lyrics((song_dir / "lyrics.txt").read_text("utf-8"))
        description_file = song_dir / "description.txt"
        description = (
            description_file.read_text("utf-8").strip()
            if description_file.exists()
            else ""
        )
        return doc, description


def _load_words(song_dir: Path) -> tuple[AsrWord, ...]:
    entries = json.loads((song_dir / "words.json").read_text("utf-8"))
    words = tuple(
        AsrWord(e["surface"], e["start_ms"], e["duration_ms"]) for e in entries
    )
    starts = [w.start_ms for w in words]
    if starts != sorted(starts):
        raise ValueError(f"{song_dir}/words.json not ordered by start")
    return words


class FixtureMediaSource:
    def __init__(self, root: Path | str):
        self.root = Path(root)

    def fetch(self, query: SongQuery) -> MediaBundle:
        song_dir, meta = _find_song_dir(self.root, query)
        subtitle_path = None
        subtitle_format = None
        for name, fmt in (("subs.vtt", SubtitleFormat.VTT), ("subs.srt", SubtitleFormat.SRT)):
            if (song_dir / name).exists():
                subtitle_path, subtitle_format = song_dir / name, fmt
                break
        if subtitle_path is None:
            raise MissingSubtitles(f"{song_dir.name} has no subtitle track")
        words = _load_words(song_dir)
        duration = int(meta.get("duration_ms") or 0)
        if not duration and words:
            duration = words[-1].start_ms + words[-1].duration_ms + 1000
        return MediaBundle(
            subtitle_data=subtitle_path.read_bytes(),
            subtitle_format=subtitle_format,
            audio=FixtureAudioHandle(words, duration),
            video_url=meta.get("video_url", ""),
        )


class FixtureAsrService:
    """Reads the handle's absolute words and re-bases them to the segment."""

    def transcribe_segment(
        self, audio: FixtureAudioHandle, start_ms: int, end_ms: int
    ) -> list[AsrWord]:
        return _crop_words(audio.words, start_ms, end_ms, audio.duration_ms)
