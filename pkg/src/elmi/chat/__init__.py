from .engine import (
    APOLOGY_REPLY,
    Busy,
    ChatEngine,
    NotNoteworthy,
    NotReady,
    TurnResult,
    classifier_values,
    load_prompt_catalog,
    opener_values,
    turn_values,
)
from .models import (
    ChatMessage,
    ChatThread,
    Intent,
    MessageOrigin,
    MessageRole,
    ThreadOpener,
)
from .persona import enforce_persona, limit_questions, strip_digit_sentences

__all__ = [
    "APOLOGY_REPLY",
    "Busy",
    "ChatEngine",
    "ChatMessage",
    "ChatThread",
    "Intent",
    "MessageOrigin",
    "MessageRole",
    "NotNoteworthy",
    "NotReady",
    "ThreadOpener",
    "TurnResult",
    "classifier_values",
    "enforce_persona",
    "limit_questions",
    "load_prompt_catalog",
    "opener_values",
    "strip_digit_sentences",
    "turn_values",
]
