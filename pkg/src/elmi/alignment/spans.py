"""Line time spans from cue matches, with proportional gap filling."""

from __future__ import annotations

from typing import Optional, Sequence

from ..textsources import SubtitleCue
from .matcher import LineMatch

__all__ = ["derive_line_spans"]

_DEFAULT_LINE_MS = 2000


def _interpolate_run(
    lengths: Sequence[int], gap_start: int, gap_end: int
) -> list[Optional[tuple[int, int]]]:
    """Split [gap_start, gap_end] proportionally to character lengths."""
    total = sum(lengths)
    if gap_end <= gap_start or total == 0:
        return [None] * len(lengths)
    gap = gap_end - gap_start
    boundaries = [gap_start]
    cumulative = 0
    for length in lengths:
        cumulative += length
        boundaries.append(gap_start + round(gap * cumulative / total))
    spans: list[Optional[tuple[int, int]]] = []
    for a, b in zip(boundaries, boundaries[1:]):
        spans.append((a, b) if a < b else None)
    return spans


def derive_line_spans(
    matches: Sequence[LineMatch],
    cues: Sequence[SubtitleCue],
    line_texts: Sequence[str],
) -> list[Optional[tuple[int, int]]]:
    """Matched lines take [min cue start, max cue end]; gaps are shared
    proportionally to line character length. Resulting spans are ordered
    and non-overlapping (overlaps split at the midpoint); lines left with
    no room get no span.
    """
    n = len(matches)
    spans: list[Optional[tuple[int, int]]] = [None] * n
    for m in matches:
        if m.cue_indices:
            start = min(cues[i].start_ms for i in m.cue_indices)
            end = max(cues[i].end_ms for i in m.cue_indices)
            spans[m.line_index] = (start, end)

    # split overlapping neighbours at the midpoint
    previous = None
    for i in range(n):
        if spans[i] is None:
            continue
        if previous is not None:
            p_start, p_end = spans[previous]
            start, end = spans[i]
            if start < p_end:
                mid = (start + p_end) // 2
                mid = max(mid, p_start + 1)
                mid = min(mid, end - 1)
                if p_start < mid:
                    spans[previous] = (p_start, mid)
                else:
                    spans[previous] = None
                if mid < end:
                    spans[i] = (mid, end)
                else:
                    spans[i] = None
                    continue
        previous = i

    matched_positions = [i for i in range(n) if spans[i] is not None]
    if matched_positions:
        default = _median_width([spans[i] for i in matched_positions])
    else:
        default = _DEFAULT_LINE_MS

    # fill runs of span-less lines
    i = 0
    while i < n:
        if spans[i] is not None:
            i += 1
            continue
        run_start = i
        while i < n and spans[i] is None:
            i += 1
        run = list(range(run_start, i))
        lengths = [max(1, len(line_texts[j])) for j in run]

        prev_end = spans[run_start - 1][1] if run_start > 0 else None
        next_start = spans[i][0] if i < n else None
        if prev_end is None and next_start is None:
            if cues:
                gap = (min(c.start_ms for c in cues), max(c.end_ms for c in cues))
            else:
                gap = (0, default * len(run))
        elif prev_end is None:
            gap = (max(0, next_start - default * len(run)), next_start)
        elif next_start is None:
            gap = (prev_end, prev_end + default * len(run))
        else:
            gap = (prev_end, next_start)
        for offset, span in enumerate(_interpolate_run(lengths, *gap)):
            spans[run[offset]] = span
    return spans


def _median_width(spans: list[tuple[int, int]]) -> int:
    widths = sorted(end - start for start, end in spans)
    mid = widths[len(widths) // 2]
    return max(mid, 1)
