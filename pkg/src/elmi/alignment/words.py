"""Word-level timing: edit-distance alignment of ASR tokens to lyric words."""

from __future__ import annotations

from difflib import SequenceMatcher
from typing import Optional, Sequence

from ..clients.base import AsrWord
from ..core.textnorm import normalize_text
from ..core.types import TimedWord

__all__ = ["align_words", "word_similarity"]

_GAP_COST = 1.0


def word_similarity(a: str, b: str) -> float:
    """Character-level ratio in [0, 1]; deterministic."""
    if a == b:
        return 1.0
    if not a or not b:
        return 0.0
    return SequenceMatcher(None, a, b).ratio()


def _edit_alignment(
    lyric_norm: Sequence[str], asr_norm: Sequence[str], substitution_threshold: float
) -> list[Optional[int]]:
    """For each lyric token, the index of its aligned ASR token (or None).

    Minimal-cost alignment: exact match costs 0, an allowed substitution
    costs 1 - similarity, gaps cost 1. Substitutions below the threshold
    are forbidden.
    """
    n, m = len(lyric_norm), len(asr_norm)
    INF = float("inf")
    cost = [[0.0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        cost[i][0] = i * _GAP_COST
    for j in range(1, m + 1):
        cost[0][j] = j * _GAP_COST
    sub = [[INF] * m for _ in range(n)]
    for i in range(n):
        for j in range(m):
            if lyric_norm[i] == asr_norm[j]:
                sub[i][j] = 0.0
            else:
                sim = word_similarity(lyric_norm[i], asr_norm[j])
                if sim >= substitution_threshold:
                    sub[i][j] = 1.0 - sim
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            cost[i][j] = min(
                cost[i - 1][j - 1] + sub[i - 1][j - 1],
                cost[i - 1][j] + _GAP_COST,
                cost[i][j - 1] + _GAP_COST,
            )

    aligned: list[Optional[int]] = [None] * n
    i, j = n, m
    while i > 0 and j > 0:
        if cost[i][j] == cost[i - 1][j - 1] + sub[i - 1][j - 1]:
            aligned[i - 1] = j - 1
            i, j = i - 1, j - 1
        elif cost[i][j] == cost[i - 1][j] + _GAP_COST:
            i -= 1
        else:
            j -= 1
    return aligned


def align_words(
    line_text: str,
    span: tuple[int, int],
    asr_words: Sequence[AsrWord],
    substitution_threshold: float = 0.50,
) -> list[TimedWord]:
    """Timed words for one line; ASR times are relative to the span start.

    Matched lyric words take the ASR times converted to absolute. Words the
    ASR missed get matched=False and times interpolated between matched
    neighbours (the span boundaries act as virtual neighbours). ASR words
    that drift outside the span are clamped with confidence capped at 0.5.
    """
    span_start, span_end = span
    surfaces = line_text.split()
    lyric_norm = [normalize_text(w) for w in surfaces]

    usable = [(k, normalize_text(w.surface)) for k, w in enumerate(asr_words)]
    usable = [(k, norm) for k, norm in usable if norm]
    asr_norm = [norm for _, norm in usable]

    aligned = _edit_alignment(lyric_norm, asr_norm, substitution_threshold)

    # empty-normalizing lyric tokens (pure punctuation) can never match
    timings: list[Optional[tuple[int, int, float]]] = [None] * len(surfaces)
    for i, pick in enumerate(aligned):
        if pick is None or not lyric_norm[i]:
            continue
        asr_word = asr_words[usable[pick][0]]
        confidence = (
            1.0
            if lyric_norm[i] == asr_norm[pick]
            else word_similarity(lyric_norm[i], asr_norm[pick])
        )
        start = span_start + asr_word.start_ms
        duration = asr_word.duration_ms
        if start < span_start or start + duration > span_end:
            start = min(max(start, span_start), max(span_start, span_end - 1))
            duration = max(0, min(duration, span_end - start))
            confidence = min(confidence, 0.5)
        timings[i] = (start, duration, confidence)

    # interpolate runs of unmatched words between matched neighbours
    words: list[Optional[TimedWord]] = [None] * len(surfaces)
    i = 0
    while i < len(surfaces):
        if timings[i] is not None:
            start, duration, confidence = timings[i]
            words[i] = TimedWord(surfaces[i], start, duration, confidence, True)
            i += 1
            continue
        run_start = i
        while i < len(surfaces) and timings[i] is None:
            i += 1
        left = (
            timings[run_start - 1][0] + timings[run_start - 1][1]
            if run_start > 0
            else span_start
        )
        right = timings[i][0] if i < len(surfaces) else span_end
        left = max(span_start, min(left, span_end))
        right = max(left, min(right, span_end))
        g = i - run_start
        positions = [
            left + round((right - left) * (t + 1) / (g + 1)) for t in range(g)
        ]
        positions.append(right)
        for t in range(g):
            duration = max(0, positions[t + 1] - positions[t])
            words[run_start + t] = TimedWord(
                surfaces[run_start + t], positions[t], duration, 0.0, False
            )

    result = [w for w in words if w is not None]
    # guard monotonicity after clamping
    for prev, cur in zip(result, result[1:]):
        if cur.start_ms < prev.start_ms:
            raise AssertionError("word starts must be non-decreasing")
    return result
