"""Translation-diversity metrics over gloss word sets."""

from __future__ import annotations

from fractions import Fraction
from typing import Collection, Iterable

from .gloss import GlossToken, TokenKind
from .textnorm import normalize_text

__all__ = ["BothEmpty", "overlap_coefficient", "manual_sign_set"]


class BothEmpty(ValueError):
    """Overlap of two empty word sets is undefined; callers skip the pair."""


def overlap_coefficient(a: Collection[str], b: Collection[str]) -> Fraction:
    """|a ∩ b| / min(|a|, |b|) as an exact rational.

    Symmetric; 1 when one non-empty set contains the other; 0 exactly when
    the intersection is empty (including when one side is empty). Raises
    BothEmpty when both sets are empty. Render as a percentage only at
    presentation time.
    """
    set_a, set_b = set(a), set(b)
    if not set_a and not set_b:
        raise BothEmpty("overlap coefficient of two empty sets is undefined")
    if not set_a or not set_b:
        return Fraction(0)
    return Fraction(len(set_a & set_b), min(len(set_a), len(set_b)))


def manual_sign_set(tokens: Iterable[GlossToken]) -> frozenset[str]:
    """Normalized surfaces of the manually produced tokens.

    NMS and classifier surfaces are free-form descriptions, so they are
    excluded; fingerspelling is produced manually and stays in.
    """
    return frozenset(
        normalize_text(t.surface)
        for t in tokens
        if t.kind in (TokenKind.MANUAL_SIGN, TokenKind.FINGERSPELLING)
        and normalize_text(t.surface)
    )
