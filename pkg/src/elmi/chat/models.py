"""Per-line discussion threads and their messages."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional

__all__ = [
    "Intent",
    "MessageRole",
    "MessageOrigin",
    "ChatMessage",
    "ChatThread",
    "ThreadOpener",
]


class Intent(str, Enum):
    MEANING = "Meaning"
    GLOSSING = "Glossing"
    EMOTING = "Emoting"
    TIMING = "Timing"


class MessageRole(str, Enum):
    USER = "user"
    ASSISTANT = "assistant"


class MessageOrigin(str, Enum):
    SHORTCUT = "shortcut"
    MANUAL = "manual"
    PROACTIVE = "proactive"
    REPLY = "reply"


_ROLE_ORIGINS = {
    MessageRole.USER: {MessageOrigin.SHORTCUT, MessageOrigin.MANUAL},
    MessageRole.ASSISTANT: {MessageOrigin.PROACTIVE, MessageOrigin.REPLY},
}


@dataclass(frozen=True)
class ChatMessage:
    seq: int
    role: MessageRole
    text: str
    origin: MessageOrigin
    intent: Optional[Intent] = None
    created_at: str = ""

    def __post_init__(self) -> None:
        if self.origin not in _ROLE_ORIGINS[self.role]:
            raise ValueError(f"origin {self.origin.value} invalid for {self.role.value}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "seq": self.seq,
            "role": self.role.value,
            "text": self.text,
            "origin": self.origin.value,
            "intent": self.intent.value if self.intent else None,
            "created_at": self.created_at,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ChatMessage":
        return cls(
            seq=data["seq"],
            role=MessageRole(data["role"]),
            text=data["text"],
            origin=MessageOrigin(data["origin"]),
            intent=Intent(data["intent"]) if data.get("intent") else None,
            created_at=data.get("created_at", ""),
        )


class ThreadOpener(str, Enum):
    USER = "user"
    PROACTIVE = "proactive"


@dataclass(frozen=True)
class ChatThread:
    id: str
    project_id: str
    line_index: int
    opened_by: ThreadOpener
    messages: tuple[ChatMessage, ...] = ()

    def __post_init__(self) -> None:
        seqs = [m.seq for m in self.messages]
        if seqs != list(range(1, len(seqs) + 1)):
            raise ValueError("message sequence numbers must be dense from 1")
