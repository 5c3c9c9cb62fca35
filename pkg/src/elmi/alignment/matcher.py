"""Subtitle-cue to lyric-line matching.

A monotone (order-preserving, non-crossing) assignment of contiguous cue
groups to lines, maximizing total similarity by dynamic programming.
Similarity arithmetic stays in exact rationals so optimality checks are
equality checks.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional, Sequence

from ..core.textnorm import normalize_text, normalized_tokens
from ..textsources import LyricsDocument, SubtitleCue

__all__ = [
    "MatchMethod",
    "LineMatch",
    "token_set_ratio",
    "optimal_monotone_assignment",
    "match_cues_to_lines",
]


class MatchMethod(str, Enum):
    EXACT = "exact"
    FUZZY = "fuzzy"
    LLM_FALLBACK = "llm_fallback"
    INTERPOLATED = "interpolated"


@dataclass(frozen=True)
class LineMatch:
    line_index: int
    cue_indices: tuple[int, ...]  # positions into the cue list, 0-based
    similarity: float
    method: MatchMethod


# line_indices, window cues (cue position, text) -> {line_index: [cue positions]}
LlmFallback = Callable[
    [list[tuple[int, str]], list[tuple[int, str]]], Optional[dict[int, list[int]]]
]


def token_set_ratio(a: Sequence[str], b: Sequence[str]) -> Fraction:
    """2·|multiset intersection| / (|a| + |b|); 0 when both are empty."""
    if not a and not b:
        return Fraction(0)
    inter = sum((Counter(a) & Counter(b)).values())
    return Fraction(2 * inter, len(a) + len(b))


def optimal_monotone_assignment(
    line_tokens: Sequence[Sequence[str]],
    cue_tokens: Sequence[Sequence[str]],
) -> tuple[list[Optional[tuple[int, int]]], Fraction]:
    """Maximize total token-set similarity over monotone assignments.

    Each line is either unassigned or takes a contiguous cue interval
    [a, b]; intervals of successive assigned lines are disjoint and
    strictly increasing. Returns per-line intervals (inclusive, 0-based)
    and the exact optimal total.
    """
    n, m = len(line_tokens), len(cue_tokens)
    line_counters = [Counter(toks) for toks in line_tokens]
    line_lens = [len(toks) for toks in line_tokens]

    zero = Fraction(0)
    # value[i][j]: best total over first i lines / first j cues
    value = [[zero] * (m + 1) for _ in range(n + 1)]
    # choice[i][j]: None (copy from value[i-1][j] or value[i][j-1]) or (k, j)
    choice: list[list[Optional[tuple[int, int]]]] = [
        [None] * (m + 1) for _ in range(n + 1)
    ]

    for i in range(1, n + 1):
        target = line_counters[i - 1]
        target_len = line_lens[i - 1]
        for j in range(1, m + 1):
            best = value[i - 1][j]
            best_choice: Optional[tuple[int, int]] = None
            if value[i][j - 1] > best:
                best = value[i][j - 1]
            # match line i-1 with cues k-1 .. j-1 (1-based k..j)
            inter = 0
            group_len = 0
            seen: Counter = Counter()
            for k in range(j, 0, -1):
                for tok in cue_tokens[k - 1]:
                    if seen[tok] < target.get(tok, 0):
                        inter += 1
                    seen[tok] += 1
                    group_len += 1
                denom = target_len + group_len
                sim = Fraction(2 * inter, denom) if denom else zero
                candidate = value[i - 1][k - 1] + sim
                if candidate > best:
                    best = candidate
                    best_choice = (k - 1, j - 1)
            value[i][j] = best
            choice[i][j] = best_choice

    assignment: list[Optional[tuple[int, int]]] = [None] * n
    i, j = n, m
    while i > 0 and j > 0:
        picked = choice[i][j]
        if picked is not None and value[i][j] > max(value[i - 1][j], value[i][j - 1]):
            assignment[i - 1] = picked
            i, j = i - 1, picked[0]
        elif value[i][j] == value[i - 1][j]:
            i -= 1
        else:
            j -= 1
    return assignment, value[n][m]


def _group_similarity(
    line_toks: Sequence[str], cue_tokens: Sequence[Sequence[str]], interval: tuple[int, int]
) -> Fraction:
    merged: list[str] = []
    for idx in range(interval[0], interval[1] + 1):
        merged.extend(cue_tokens[idx])
    return token_set_ratio(line_toks, merged)


def _validate_fallback_mapping(
    mapping: dict[int, list[int]], region_lines: list[int], window: list[int]
) -> bool:
    window_set = set(window)
    previous_max = -1
    for line_index in sorted(mapping):
        if line_index not in region_lines:
            return False
        cues = mapping[line_index]
        if not cues:
            return False
        ordered = sorted(cues)
        if ordered != list(range(ordered[0], ordered[-1] + 1)):
            return False  # not contiguous
        if not set(ordered) <= window_set:
            return False
        if ordered[0] <= previous_max:
            return False  # crossing or reuse
        previous_max = ordered[-1]
    return True


def match_cues_to_lines(
    cues: Sequence[SubtitleCue],
    doc: LyricsDocument,
    fuzzy_threshold: float = 0.60,
    llm_fallback: LlmFallback | None = None,
) -> list[LineMatch]:
    """Match every lyric line to cues; unmatched lines come back interpolated.

    DP pairs at or above the fuzzy threshold are accepted directly.
    Contiguous runs of rejected lines are offered to the LLM fallback as one
    batch; mappings that break monotonicity are discarded and the run falls
    back to interpolation.
    """
    lines = [text for _, text in doc.flat_lines()]
    line_tokens = [normalized_tokens(text) for text in lines]
    cue_tokens = [normalized_tokens(c.text) for c in cues]
    threshold = Fraction(str(fuzzy_threshold))

    assignment, _ = optimal_monotone_assignment(line_tokens, cue_tokens)

    matches: list[Optional[LineMatch]] = [None] * len(lines)
    for i, interval in enumerate(assignment):
        if interval is None:
            continue
        sim = _group_similarity(line_tokens[i], cue_tokens, interval)
        if sim < threshold:
            continue
        group_text = " ".join(
            normalize_text(cues[idx].text) for idx in range(interval[0], interval[1] + 1)
        )
        method = (
            MatchMethod.EXACT
            if group_text == normalize_text(lines[i])
            else MatchMethod.FUZZY
        )
        matches[i] = LineMatch(
            line_index=i,
            cue_indices=tuple(range(interval[0], interval[1] + 1)),
            similarity=float(sim),
            method=method,
        )

    if llm_fallback is not None:
        _apply_llm_fallback(matches, lines, line_tokens, cues, cue_tokens, llm_fallback)

    for i in range(len(lines)):
        if matches[i] is None:
            matches[i] = LineMatch(i, (), 0.0, MatchMethod.INTERPOLATED)
    return [m for m in matches if m is not None]


def _apply_llm_fallback(
    matches: list[Optional[LineMatch]],
    lines: list[str],
    line_tokens: list[list[str]],
    cues: Sequence[SubtitleCue],
    cue_tokens: list[list[str]],
    llm_fallback: LlmFallback,
) -> None:
    n = len(lines)
    i = 0
    while i < n:
        if matches[i] is not None:
            i += 1
            continue
        run_start = i
        while i < n and matches[i] is None:
            i += 1
        run = list(range(run_start, i))
        # cue window strictly between the accepted neighbours
        left = max(
            (max(m.cue_indices) for m in matches[:run_start] if m and m.cue_indices),
            default=-1,
        )
        right = min(
            (min(m.cue_indices) for m in matches[i:] if m and m.cue_indices),
            default=len(cues),
        )
        window = list(range(left + 1, right))
        if not window:
            continue
        mapping = llm_fallback(
            [(idx, lines[idx]) for idx in run],
            [(idx, cues[idx].text) for idx in window],
        )
        if not mapping or not _validate_fallback_mapping(mapping, run, window):
            continue
        for line_index, cue_list in mapping.items():
            ordered = sorted(cue_list)
            sim = _group_similarity(
                line_tokens[line_index], cue_tokens, (ordered[0], ordered[-1])
            )
            matches[line_index] = LineMatch(
                line_index=line_index,
                cue_indices=tuple(ordered),
                similarity=float(sim),
                method=MatchMethod.LLM_FALLBACK,
            )
