"""Text normalization used by alignment and the diversity metrics."""

from __future__ import annotations

# Typographic characters are folded before stripping so that curly
# apostrophes survive the intra-word rule like straight ones do.
_QUOTE_FOLD = str.maketrans(
    {
        "‘": "'",
        "’": "'",
        "“": '"',
        "”": '"',
        "„": '"',
        "–": " ",
        "—": " ",
    }
)


def _is_word_char(ch: str) -> bool:
    return ch.isalnum()


def normalize_text(raw: str) -> str:
    """Lowercase, strip punctuation, collapse whitespace.

    Apostrophes survive when touching a word character on either side
    ("gon'" and "i'm" both keep theirs); hyphens survive only between two
    word characters ("same-as"). Everything else non-alphanumeric becomes
    a space, and whitespace runs collapse. Idempotent.
    """
    folded = raw.translate(_QUOTE_FOLD).lower()
    out: list[str] = []
    n = len(folded)
    for i, ch in enumerate(folded):
        if _is_word_char(ch) or ch.isspace():
            out.append(ch)
            continue
        prev_word = i > 0 and _is_word_char(folded[i - 1])
        next_word = i + 1 < n and _is_word_char(folded[i + 1])
        if ch == "'" and (prev_word or next_word):
            out.append(ch)
        elif ch == "-" and prev_word and next_word:
            out.append(ch)
        else:
            out.append(" ")
    return " ".join("".join(out).split())


def normalized_tokens(raw: str) -> list[str]:
    """Normalized word tokens of ``raw``; the unit every matcher works on."""
    return normalize_text(raw).split()
