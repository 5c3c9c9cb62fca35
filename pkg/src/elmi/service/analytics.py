"""Per-line gloss metrics and pairwise overlap across gloss variants.

Within one project the variants are the line's version history; across a
corpus of projects they are each project's latest gloss. Overlap stays in
exact rationals internally and becomes a percentage string only here.
"""

from __future__ import annotations

import statistics
from fractions import Fraction
from itertools import combinations
from typing import TYPE_CHECKING, Any, Optional, Sequence

from ..core import BothEmpty, GlossLine, gloss_metrics, manual_sign_set, overlap_coefficient

if TYPE_CHECKING:
    from ..store import Store

__all__ = ["line_analytics", "project_analytics", "corpus_analytics", "pct"]


def pct(value: Fraction) -> str:
    scaled = value * 100
    return f"{scaled.numerator / scaled.denominator:.2f}%"


def _mean_pairwise_overlap(variants: Sequence[GlossLine]) -> Optional[Fraction]:
    values: list[Fraction] = []
    for a, b in combinations(variants, 2):
        try:
            values.append(
                overlap_coefficient(manual_sign_set(a.tokens), manual_sign_set(b.tokens))
            )
        except BothEmpty:
            continue  # skip pairs with no manual signs on either side
    if not values:
        return None
    return sum(values, Fraction(0)) / len(values)


def line_analytics(line_index: int, variants: Sequence[GlossLine]) -> dict[str, Any]:
    counts = [gloss_metrics(list(g.tokens)) for g in variants]
    sign_counts = [c.sign_count for c in counts]
    entry: dict[str, Any] = {
        "line_index": line_index,
        "variants": [
            {
                "version": g.version,
                "raw": g.raw,
                "sign_count": c.sign_count,
                "nms_count": c.nms_count,
            }
            for g, c in zip(variants, counts)
        ],
        "sign_count_min": min(sign_counts),
        "sign_count_max": max(sign_counts),
        "sign_count_mean": round(statistics.fmean(sign_counts), 2),
        "sign_count_std": (
            round(statistics.stdev(sign_counts), 2) if len(sign_counts) > 1 else None
        ),
    }
    overlap = _mean_pairwise_overlap(variants) if len(variants) >= 2 else None
    entry["mean_overlap"] = pct(overlap) if overlap is not None else None
    entry["mean_overlap_exact"] = (
        [overlap.numerator, overlap.denominator] if overlap is not None else None
    )
    return entry


def project_analytics(store: "Store", project_id: str) -> dict[str, Any]:
    """Variants per line = the full version history within the project."""
    lines = []
    latest = store.latest_glosses(project_id)
    for line_index in sorted(latest):
        history = store.gloss_history(project_id, line_index)
        lines.append(line_analytics(line_index, history))
    return {"project_id": project_id, "lines": lines}


def corpus_analytics(store: "Store", project_ids: Sequence[str]) -> dict[str, Any]:
    """Variants per line = each project's latest gloss for that line."""
    by_line: dict[int, list[GlossLine]] = {}
    for project_id in project_ids:
        for line_index, gloss in store.latest_glosses(project_id).items():
            by_line.setdefault(line_index, []).append(gloss)
    lines = [line_analytics(i, v) for i, v in sorted(by_line.items())]
    return {"projects": list(project_ids), "lines": lines}
