"""WebVTT and SubRip cue parsing with millisecond timestamps.

Timestamps are integer milliseconds end to end; no floats enter the
alignment arithmetic.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

__all__ = [
    "SubtitleFormat",
    "SubtitleCue",
    "SubtitleParseResult",
    "MalformedTimestamp",
    "EmptyDocument",
    "parse_subtitles",
    "serialize_cues",
]


class SubtitleFormat(str, Enum):
    VTT = "vtt"
    SRT = "srt"


class MalformedTimestamp(ValueError):
    def __init__(self, line_number: int, text: str):
        super().__init__(f"malformed timestamp on line {line_number}: {text!r}")
        self.line_number = line_number


class EmptyDocument(ValueError):
    pass


@dataclass(frozen=True)
class SubtitleCue:
    index: int
    start_ms: int
    end_ms: int
    text: str

    def __post_init__(self) -> None:
        if self.start_ms >= self.end_ms:
            raise ValueError(f"cue {self.index}: start must precede end")


@dataclass(frozen=True)
class SubtitleParseResult:
    cues: tuple[SubtitleCue, ...]
    warnings: tuple[str, ...]


_TAG_RE = re.compile(r"<[^>]*>")
# hours optional in VTT ("01:02.500"), mandatory in the files we emit
_TIME_RE = re.compile(r"^(?:(\d+):)?(\d{1,2}):(\d{2})[.,](\d{3})$")
_ARROW_RE = re.compile(r"-->")


def _parse_timestamp(text: str, line_number: int) -> int:
    m = _TIME_RE.match(text.strip())
    if not m:
        raise MalformedTimestamp(line_number, text)
    hours = int(m.group(1) or 0)
    minutes, seconds, millis = int(m.group(2)), int(m.group(3)), int(m.group(4))
    if minutes >= 60 or seconds >= 60:
        raise MalformedTimestamp(line_number, text)
    return ((hours * 60 + minutes) * 60 + seconds) * 1000 + millis


def _format_timestamp(ms: int, fmt: SubtitleFormat) -> str:
    seconds, millis = divmod(ms, 1000)
    minutes, seconds = divmod(seconds, 60)
    hours, minutes = divmod(minutes, 60)
    sep = "." if fmt is SubtitleFormat.VTT else ","
    return f"{hours:02d}:{minutes:02d}:{seconds:02d}{sep}{millis:03d}"


def _clean_text(rows: list[str]) -> str:
    cleaned = [_TAG_RE.sub("", row).strip() for row in rows]
    return " ".join(part for part in cleaned if part)


def _iter_blocks(lines: list[str]):
    """Yield (first_line_number, rows) for blank-line separated blocks."""
    block: list[str] = []
    block_start = 1
    for number, line in enumerate(lines, start=1):
        if line.strip():
            if not block:
                block_start = number
            block.append(line)
        elif block:
            yield block_start, block
            block = []
    if block:
        yield block_start, block


def parse_subtitles(data: bytes, fmt: SubtitleFormat) -> SubtitleParseResult:
    """Parse cue blocks; styling tags stripped, rows joined with spaces.

    Consecutive rollup duplicates (identical text, overlapping spans) are
    merged; remaining overlaps are kept but flagged in the warnings list.
    """
    text = data.decode("utf-8-sig")
    lines = text.splitlines()

    cues: list[SubtitleCue] = []
    warnings: list[str] = []
    for block_start, rows in _iter_blocks(lines):
        offset = 0
        if fmt is SubtitleFormat.VTT and rows[0].strip().upper().startswith("WEBVTT"):
            continue
        if fmt is SubtitleFormat.VTT and rows[0].strip().upper() in ("NOTE", "STYLE", "REGION"):
            continue
        if not _ARROW_RE.search(rows[0]) and len(rows) > 1 and _ARROW_RE.search(rows[1]):
            offset = 1  # SRT counter or VTT cue identifier
        timing_row = rows[offset] if offset < len(rows) else ""
        if not _ARROW_RE.search(timing_row):
            continue  # stray block without timings
        start_text, _, rest = timing_row.partition("-->")
        end_text = rest.strip().split(" ")[0]  # drop VTT cue settings
        line_number = block_start + offset
        start_ms = _parse_timestamp(start_text, line_number)
        end_ms = _parse_timestamp(end_text, line_number)
        if start_ms >= end_ms:
            raise MalformedTimestamp(line_number, timing_row.strip())
        body = _clean_text(rows[offset + 1 :])
        if not body:
            continue
        cues.append(SubtitleCue(len(cues) + 1, start_ms, end_ms, body))

    if not cues:
        raise EmptyDocument("no cues found")

    cues.sort(key=lambda c: (c.start_ms, c.end_ms))

    merged: list[SubtitleCue] = []
    for cue in cues:
        if (
            merged
            and cue.text == merged[-1].text
            and cue.start_ms < merged[-1].end_ms
        ):
            prev = merged[-1]
            merged[-1] = SubtitleCue(
                prev.index, prev.start_ms, max(prev.end_ms, cue.end_ms), prev.text
            )
            continue
        merged.append(cue)

    renumbered = [
        SubtitleCue(i + 1, c.start_ms, c.end_ms, c.text) for i, c in enumerate(merged)
    ]
    for prev, cue in zip(renumbered, renumbered[1:]):
        if cue.start_ms < prev.end_ms:
            warnings.append(
                f"cues {prev.index} and {cue.index} overlap "
                f"({prev.end_ms} > {cue.start_ms})"
            )
    return SubtitleParseResult(tuple(renumbered), tuple(warnings))


def serialize_cues(cues: list[SubtitleCue], fmt: SubtitleFormat) -> str:
    blocks: list[str] = []
    if fmt is SubtitleFormat.VTT:
        blocks.append("WEBVTT")
    for i, cue in enumerate(cues, start=1):
        timing = (
            f"{_format_timestamp(cue.start_ms, fmt)} --> "
            f"{_format_timestamp(cue.end_ms, fmt)}"
        )
        if fmt is SubtitleFormat.SRT:
            blocks.append(f"{i}\n{timing}\n{cue.text}")
        else:
            blocks.append(f"{timing}\n{cue.text}")
    return "\n\n".join(blocks) + "\n"
