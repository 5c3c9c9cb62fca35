from .gloss import (
    GlossLine,
    GlossMetrics,
    GlossToken,
    TokenKind,
    UnbalancedBracket,
    gloss_metrics,
    serialize_tokens,
    tokenize_gloss,
)
from .metrics import BothEmpty, manual_sign_set, overlap_coefficient
from .textnorm import normalize_text, normalized_tokens
from .types import (
    LyricLine,
    MediaRefs,
    Proficiency,
    ProjectStatus,
    SignLanguage,
    SongProject,
    TimedLyric,
    TimedWord,
    UserProfile,
    check_status_transition,
)

__all__ = [
    "BothEmpty",
    "GlossLine",
    "GlossMetrics",
    "GlossToken",
    "LyricLine",
    "MediaRefs",
    "Proficiency",
    "ProjectStatus",
    "SignLanguage",
    "SongProject",
    "TimedLyric",
    "TimedWord",
    "TokenKind",
    "UnbalancedBracket",
    "UserProfile",
    "check_status_transition",
    "gloss_metrics",
    "manual_sign_set",
    "normalize_text",
    "normalized_tokens",
    "overlap_coefficient",
    "serialize_tokens",
    "tokenize_gloss",
]
