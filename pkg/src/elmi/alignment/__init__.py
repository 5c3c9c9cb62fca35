from .export import to_json, to_lrc
from .llmfallback import make_llm_fallback
from .matcher import (
    LineMatch,
    MatchMethod,
    match_cues_to_lines,
    optimal_monotone_assignment,
    token_set_ratio,
)
from .pipeline import AlignmentReport, build_timed_lyrics
from .spans import derive_line_spans
from .words import align_words, word_similarity

__all__ = [
    "AlignmentReport",
    "LineMatch",
    "MatchMethod",
    "align_words",
    "build_timed_lyrics",
    "derive_line_spans",
    "make_llm_fallback",
    "match_cues_to_lines",
    "optimal_monotone_assignment",
    "to_json",
    "to_lrc",
    "token_set_ratio",
    "word_similarity",
]
