"""Authoring helper for deterministic mock-provider tables.

Given the desired per-line outputs of each stage, produce the exact
key -> response table the preprocessing chain will look up. Used by the
fixture generator and the test suite.
"""

from __future__ import annotations

import json
from typing import Any, Sequence

from ..llm import mock_key
from .models import AltGlosses, ChallengeNote
from .stages import (
    BatchLine,
    alternatives_values,
    base_gloss_values,
    guide_values,
    inspector_values,
    make_batches,
)

__all__ = ["build_analysis_mock_table"]


def build_analysis_mock_table(
    lines: Sequence[BatchLine],
    metadata: dict[str, Any],
    sign_language: str,
    notes: dict[int, ChallengeNote],
    glosses: dict[int, str],
    guides: dict[int, tuple[Sequence[str], str]],
    alternatives: dict[int, AltGlosses],
    batch_size: int = 10,
) -> dict[str, str]:
    table: dict[str, str] = {}
    batches = make_batches(list(lines), batch_size)

    for batch in batches:
        values = inspector_values(batch, metadata)
        payload = {"notes": [notes[b.index].to_dict() for b in batch]}
        table[mock_key("line_inspector", values)] = json.dumps(payload)

    for batch in batches:
        values = base_gloss_values(batch, notes, sign_language, metadata)
        payload = {
            "glosses": [
                {"line_index": b.index, "gloss": glosses[b.index]} for b in batch
            ]
        }
        table[mock_key("base_gloss", values)] = json.dumps(payload)

    for batch in batches:
        values = guide_values(batch, glosses, notes, metadata)
        payload = {
            "guides": [
                {
                    "line_index": b.index,
                    "mood_hashtags": list(guides[b.index][0]),
                    "performance_guide": guides[b.index][1],
                }
                for b in batch
            ]
        }
        table[mock_key("performance_guide", values)] = json.dumps(payload)

    for batch in batches:
        values = alternatives_values(batch, glosses, notes, metadata)
        payload = {
            "alternatives": [
                {
                    "line_index": b.index,
                    "shorter": alternatives[b.index].shorter,
                    "base_alt": alternatives[b.index].base_alt,
                    "longer": alternatives[b.index].longer,
                }
                for b in batch
            ]
        }
        table[mock_key("alternative_gloss", values)] = json.dumps(payload)

    return table
