"""Per-line analysis artifacts produced by the preprocessing chain."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

__all__ = ["ChallengeKind", "ChallengeNote", "AltGlosses", "LineAnnotation"]


class ChallengeKind(str, Enum):
    POETIC = "poetic"
    CULTURAL = "cultural"
    MISMATCH = "mismatch"
    NONE = "none"


@dataclass(frozen=True)
class ChallengeNote:
    line_index: int
    kind: ChallengeKind
    summary: str = ""
    needs_fingerspelling_hint: bool = False

    def __post_init__(self) -> None:
        if self.kind is ChallengeKind.NONE and self.summary:
            raise ValueError("kind=none implies an empty summary")

    @property
    def noteworthy(self) -> bool:
        return self.kind is not ChallengeKind.NONE

    def to_dict(self) -> dict[str, Any]:
        return {
            "line_index": self.line_index,
            "kind": self.kind.value,
            "summary": self.summary,
            "needs_fingerspelling_hint": self.needs_fingerspelling_hint,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ChallengeNote":
        return cls(
            line_index=data["line_index"],
            kind=ChallengeKind(data["kind"]),
            summary=data.get("summary", ""),
            needs_fingerspelling_hint=data.get("needs_fingerspelling_hint", False),
        )


@dataclass(frozen=True)
class AltGlosses:
    shorter: str
    base_alt: str
    longer: str


@dataclass(frozen=True)
class LineAnnotation:
    line_index: int
    challenge: ChallengeNote
    base_gloss: str
    alt_glosses: AltGlosses
    mood_hashtags: tuple[str, ...] = ()
    performance_guide: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "line_index": self.line_index,
            "challenge": self.challenge.to_dict(),
            "base_gloss": self.base_gloss,
            "alt_glosses": {
                "shorter": self.alt_glosses.shorter,
                "base_alt": self.alt_glosses.base_alt,
                "longer": self.alt_glosses.longer,
            },
            "mood_hashtags": list(self.mood_hashtags),
            "performance_guide": self.performance_guide,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "LineAnnotation":
        alt = data["alt_glosses"]
        return cls(
            line_index=data["line_index"],
            challenge=ChallengeNote.from_dict(data["challenge"]),
            base_gloss=data["base_gloss"],
            alt_glosses=AltGlosses(alt["shorter"], alt["base_alt"], alt["longer"]),
            mood_hashtags=tuple(data.get("mood_hashtags", ())),
            performance_guide=data.get("performance_guide", ""),
        )
