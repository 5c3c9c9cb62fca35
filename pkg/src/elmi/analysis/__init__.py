from .models import AltGlosses, ChallengeKind, ChallengeNote, LineAnnotation
from .preprocess import PreprocessFailed, run_preprocess
from .stages import (
    STAGES,
    BatchLine,
    StageError,
    UnparseableGloss,
    generate_alternatives,
    generate_base_gloss,
    generate_performance_guides,
    inspect_lines,
    make_batches,
)

__all__ = [
    "STAGES",
    "AltGlosses",
    "BatchLine",
    "ChallengeKind",
    "ChallengeNote",
    "LineAnnotation",
    "PreprocessFailed",
    "StageError",
    "UnparseableGloss",
    "generate_alternatives",
    "generate_base_gloss",
    "generate_performance_guides",
    "inspect_lines",
    "make_batches",
    "run_preprocess",
]
