"""Provider-backed fallback matcher for ambiguous cue regions.

The fallback sees only the ambiguous window (candidate lines plus unused
cues) and proposes a mapping; the matcher re-validates monotonicity and
discards anything invalid, so a misbehaving provider can only ever cause
interpolation, never a crossing.
"""

from __future__ import annotations

import json
import logging

from ..llm import (
    ChatProvider,
    FieldSpec,
    ProviderError,
    StructuredSpec,
    ValidationExhausted,
    complete_structured,
    exchange_from_rendered,
)
from .matcher import LlmFallback

logger = logging.getLogger(__name__)

__all__ = ["make_llm_fallback"]

_SYSTEM = """\
You align karaoke subtitle cues to song lyric lines. Given lyric lines and
subtitle cues (each with an index), assign to each line the cue indices
that carry its text, preserving order: assignments must not cross, and a
cue may serve at most one line. Leave out lines that match no cue. Reply
with JSON only: {"mapping": [{"line_index": int, "cue_indices": [int]}]}"""

_SPEC = StructuredSpec(
    fields=(
        FieldSpec(
            "mapping",
            "list",
            item=FieldSpec(
                "entry",
                "dict",
                fields=(
                    FieldSpec("line_index", "int"),
                    FieldSpec("cue_indices", "list", min_items=1, item=FieldSpec("i", "int")),
                ),
            ),
        ),
    ),
    max_retries=1,
)


def make_llm_fallback(provider: ChatProvider) -> LlmFallback:
    def fallback(lines, window):
        values = {
            "lines": [{"index": i, "text": text} for i, text in lines],
            "cues": [{"index": i, "text": text} for i, text in window],
        }
        exchange = exchange_from_rendered(
            "cue_line_fallback",
            values,
            system=_SYSTEM,
            history=(("user", json.dumps(values, sort_keys=True)),),
        )
        try:
            record = complete_structured(provider, exchange, _SPEC).record
        except (ProviderError, ValidationExhausted) as exc:
            logger.info("cue-line fallback unavailable (%s); interpolating", exc)
            return None
        return {
            entry["line_index"]: list(entry["cue_indices"])
            for entry in record["mapping"]
        }

    return fallback
