"""Interchange exports for timed lyrics: JSON and LRC."""

from __future__ import annotations

import json

from ..core import TimedLyric
from ..store.db import timed_lyric_to_dict

__all__ = ["to_json", "to_lrc"]


def to_json(timed: TimedLyric) -> str:
    return json.dumps(timed_lyric_to_dict(timed), indent=2, sort_keys=True)


def _lrc_stamp(ms: int) -> str:
    minutes, rest = divmod(ms, 60_000)
    seconds, millis = divmod(rest, 1000)
    return f"[{minutes:02d}:{seconds:02d}.{millis // 10:02d}]"


def to_lrc(timed: TimedLyric) -> str:
    """Line-level LRC; spanless lines are emitted without a timestamp tag."""
    rows = []
    for line in timed.lines:
        if line.span is not None:
            rows.append(f"{_lrc_stamp(line.span[0])}{line.text}")
        else:
            rows.append(line.text)
    return "\n".join(rows) + "\n"
