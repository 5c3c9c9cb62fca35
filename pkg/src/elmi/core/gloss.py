"""Gloss notation: tokenizer and per-line sign/NMS counts.

The notation (full EBNF in docs/gloss-grammar.md):

* ``[...]`` bracketed segments are non-manual signals (NMS); they may
  contain spaces, quotes, and parentheses.
* Tokens opening with a classifier prefix (``CL``, ``LCL``, ``BPCL``,
  ``DCL``, ``SCL``, ``ICL``, ``PCL``, ``BCL``) followed by ``:``, ``-``,
  ``(`` or end of token are classifiers; one following parenthesized
  descriptor attaches to the token ("CL-5 (basketball shooting)").
* ``F-S`` followed by one quoted letter group is a single fingerspelling
  token ("F-S 'L-E-B-R-O-N'").
* Everything else, whitespace-separated, is a manual sign.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

__all__ = [
    "TokenKind",
    "GlossToken",
    "GlossLine",
    "GlossMetrics",
    "UnbalancedBracket",
    "tokenize_gloss",
    "gloss_metrics",
    "serialize_tokens",
]

# Longest first so BPCL is not mistaken for a PCL/CL prefix.
CLASSIFIER_PREFIXES = ("BPCL", "DCL", "SCL", "ICL", "PCL", "BCL", "LCL", "CL")

_QUOTE_CHARS = ("'", '"', "‘", "’", "“", "”", "`")


class TokenKind(str, Enum):
    MANUAL_SIGN = "manual_sign"
    NMS = "nms"
    CLASSIFIER = "classifier"
    FINGERSPELLING = "fingerspelling"


@dataclass(frozen=True)
class GlossToken:
    kind: TokenKind
    surface: str


@dataclass(frozen=True)
class GlossMetrics:
    sign_count: int
    nms_count: int


class UnbalancedBracket(ValueError):
    """An opening ``[`` or ``(`` is never closed."""

    def __init__(self, opener: str, offset: int):
        super().__init__(f"unclosed {opener!r} at byte offset {offset}")
        self.opener = opener
        self.offset = offset


def _scan_chunks(raw: str) -> list[tuple[str, int]]:
    """Split into whitespace-delimited chunks, keeping group contents intact.

    Inside ``[...]`` and ``(...)`` groups whitespace does not delimit; the
    group runs to the first matching closer. Stray closers are ordinary
    characters.
    """
    chunks: list[tuple[str, int]] = []
    i = 0
    n = len(raw)
    while i < n:
        while i < n and raw[i].isspace():
            i += 1
        if i >= n:
            break
        start = i
        while i < n and not raw[i].isspace():
            ch = raw[i]
            if ch == "[":
                close = raw.find("]", i + 1)
                if close == -1:
                    raise UnbalancedBracket("[", i)
                i = close + 1
            elif ch == "(":
                close = raw.find(")", i + 1)
                if close == -1:
                    raise UnbalancedBracket("(", i)
                i = close + 1
            else:
                i += 1
        chunks.append((raw[start:i], start))
    return chunks


def _classifier_prefix(chunk: str) -> bool:
    for prefix in CLASSIFIER_PREFIXES:
        if chunk == prefix:
            return True
        if chunk.startswith(prefix) and chunk[len(prefix)] in ":-(":
            return True
    return False


def _is_paren_group(chunk: str) -> bool:
    return chunk.startswith("(") and chunk.endswith(")")


def _is_quoted_group(chunk: str) -> bool:
    return len(chunk) >= 2 and chunk[0] in _QUOTE_CHARS


def tokenize_gloss(raw: str) -> list[GlossToken]:
    """Tokenize a gloss string; raises UnbalancedBracket on unclosed groups.

    Tokens partition the non-whitespace content: joining surfaces with
    single spaces round-trips to the whitespace-normalized input.
    """
    chunks = _scan_chunks(raw)
    tokens: list[GlossToken] = []
    i = 0
    while i < len(chunks):
        chunk, _ = chunks[i]
        if chunk.startswith("[") and chunk.endswith("]"):
            tokens.append(GlossToken(TokenKind.NMS, chunk))
            i += 1
        elif chunk == "F-S" and i + 1 < len(chunks) and _is_quoted_group(chunks[i + 1][0]):
            tokens.append(
                GlossToken(TokenKind.FINGERSPELLING, chunk + " " + chunks[i + 1][0])
            )
            i += 2
        elif chunk.startswith("F-S") and len(chunk) > 3 and chunk[3] in _QUOTE_CHARS:
            tokens.append(GlossToken(TokenKind.FINGERSPELLING, chunk))
            i += 1
        elif _classifier_prefix(chunk):
            surface = chunk
            if i + 1 < len(chunks) and _is_paren_group(chunks[i + 1][0]):
                surface += " " + chunks[i + 1][0]
                i += 1
            tokens.append(GlossToken(TokenKind.CLASSIFIER, surface))
            i += 1
        else:
            tokens.append(GlossToken(TokenKind.MANUAL_SIGN, chunk))
            i += 1
    return tokens


def serialize_tokens(tokens: list[GlossToken]) -> str:
    return " ".join(token.surface for token in tokens)


def gloss_metrics(tokens: list[GlossToken]) -> GlossMetrics:
    """Manual signs and fingerspelling count as signs; NMS and classifiers as NMS."""
    signs = sum(
        1
        for t in tokens
        if t.kind in (TokenKind.MANUAL_SIGN, TokenKind.FINGERSPELLING)
    )
    return GlossMetrics(sign_count=signs, nms_count=len(tokens) - signs)


@dataclass(frozen=True)
class GlossLine:
    """One persisted revision of a line's gloss. Versions start at 1."""

    line_index: int
    raw: str
    tokens: tuple[GlossToken, ...]
    version: int
    authored_at: str  # RFC 3339

    @classmethod
    def create(cls, line_index: int, raw: str, version: int, authored_at: str) -> "GlossLine":
        return cls(
            line_index=line_index,
            raw=raw,
            tokens=tuple(tokenize_gloss(raw)),
            version=version,
            authored_at=authored_at,
        )
