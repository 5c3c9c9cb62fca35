"""The four chained inference stages that preprocess a song.

Dataflow: the line inspector's notes feed the base-gloss generator; its
glosses feed both the performance-guide generator and the alternative-gloss
generator. No stage reads a later stage's output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Callable, Sequence

from ..core import gloss_metrics, tokenize_gloss
from ..core.gloss import UnbalancedBracket
from ..llm import (
    ChatProvider,
    FieldSpec,
    StructuredSpec,
    ValidationExhausted,
    complete_structured,
    exchange_from_rendered,
)
from .models import AltGlosses, ChallengeKind, ChallengeNote

__all__ = [
    "STAGES",
    "StageError",
    "UnparseableGloss",
    "BatchLine",
    "make_batches",
    "inspect_lines",
    "generate_base_gloss",
    "generate_performance_guides",
    "generate_alternatives",
    "inspector_values",
    "base_gloss_values",
    "guide_values",
    "alternatives_values",
]

STAGES = ("line_inspector", "base_gloss", "performance_guide", "alternative_gloss")

MAX_GUIDE_CHARS = 500


class StageError(Exception):
    def __init__(self, stage: str, line_indices: Sequence[int], cause: Exception):
        super().__init__(f"stage {stage} failed for lines {list(line_indices)}: {cause}")
        self.stage = stage
        self.line_indices = list(line_indices)
        self.cause = cause


class UnparseableGloss(ValueError):
    def __init__(self, stage: str, failures: dict[int, str]):
        super().__init__(f"{stage}: glosses failed the grammar for lines {sorted(failures)}")
        self.failures = failures


@dataclass(frozen=True)
class BatchLine:
    index: int
    section: str
    text: str


def make_batches(lines: Sequence[BatchLine], batch_size: int = 10) -> list[list[BatchLine]]:
    """Chunk lines into batches of at most ``batch_size``.

    Batch boundaries never split a section; a section larger than the batch
    size is the one exception and splits internally.
    """
    runs: list[list[BatchLine]] = []
    for line in lines:
        if runs and runs[-1][0].section == line.section:
            runs[-1].append(line)
        else:
            runs.append([line])

    batches: list[list[BatchLine]] = []
    current: list[BatchLine] = []
    for run in runs:
        if len(current) + len(run) <= batch_size:
            current.extend(run)
            continue
        if current:
            batches.append(current)
            current = []
        if len(run) <= batch_size:
            current = list(run)
        else:
            for start in range(0, len(run), batch_size):
                chunk = run[start : start + batch_size]
                if len(chunk) == batch_size:
                    batches.append(chunk)
                else:
                    current = chunk
    if current:
        batches.append(current)
    return batches


def inspector_values(batch: Sequence[BatchLine], metadata: dict[str, Any]) -> dict[str, Any]:
    return {
        "song": _song_values(metadata),
        "lines": [{"index": b.index, "section": b.section, "text": b.text} for b in batch],
    }


def base_gloss_values(
    batch: Sequence[BatchLine],
    notes_by_line: dict[int, ChallengeNote],
    sign_language: str,
    metadata: dict[str, Any],
) -> dict[str, Any]:
    return {
        "song": _song_values(metadata),
        "sign_language": sign_language,
        "lines": [
            {
                "index": b.index,
                "text": b.text,
                "note": notes_by_line[b.index].to_dict() if b.index in notes_by_line else None,
            }
            for b in batch
        ],
    }


def guide_values(
    batch: Sequence[BatchLine],
    glosses: dict[int, str],
    notes_by_line: dict[int, ChallengeNote],
    metadata: dict[str, Any],
) -> dict[str, Any]:
    return {
        "song": _song_values(metadata),
        "lines": [
            {
                "index": b.index,
                "text": b.text,
                "gloss": glosses.get(b.index, ""),
                "note": notes_by_line[b.index].to_dict() if b.index in notes_by_line else None,
            }
            for b in batch
        ],
    }


def alternatives_values(
    batch: Sequence[BatchLine],
    glosses: dict[int, str],
    notes_by_line: dict[int, ChallengeNote],
    metadata: dict[str, Any],
) -> dict[str, Any]:
    return {
        "song": _song_values(metadata),
        "lines": [
            {
                "index": b.index,
                "text": b.text,
                "base_gloss": glosses.get(b.index, ""),
                "note": notes_by_line[b.index].to_dict() if b.index in notes_by_line else None,
            }
            for b in batch
        ],
    }


def _song_values(metadata: dict[str, Any]) -> dict[str, Any]:
    return {
        "title": metadata.get("title", ""),
        "artist": metadata.get("artist", ""),
        "description": metadata.get("description", ""),
        "sign_language": metadata.get("sign_language", ""),
        "nickname": metadata.get("nickname", ""),
        "proficiency": metadata.get("proficiency", ""),
    }


def _run_batch(
    provider: ChatProvider,
    stage: str,
    system: str,
    values: dict[str, Any],
    spec: StructuredSpec,
    domain_check: Callable[[dict], list[str]] | None = None,
    domain_retries: int = 2,
) -> dict:
    exchange = exchange_from_rendered(
        stage,
        values,
        system=system,
        history=(("user", json.dumps(values, sort_keys=True, ensure_ascii=False)),),
    )
    attempt = 0
    while True:
        record = complete_structured(provider, exchange, spec).record
        if domain_check is None:
            return record
        errors = domain_check(record)
        if not errors:
            return record
        if attempt >= domain_retries:
            raise ValidationExhausted(errors, json.dumps(record), attempt + 1)
        attempt += 1
        correction = (
            "The previous response failed validation: "
            + "; ".join(errors)
            + ". Respond again with corrected JSON only."
        )
        exchange = exchange_from_rendered(
            stage,
            values,
            system=system,
            history=exchange.history
            + (("assistant", json.dumps(record)), ("user", correction)),
        )


# --- stage B: line inspector --------------------------------------------------

_INSPECTOR_SYSTEM = """\
You annotate song lyric lines with translation challenges for sign language
interpreters. For each line decide whether it is poetic (metaphor, simile,
wordplay), cultural (names, references needing context), mismatch (meaning
that does not map to a direct sign), or none. Flag lines whose proper nouns
may need fingerspelling. Reply with JSON only:
{"notes": [{"line_index": int, "kind": "poetic|cultural|mismatch|none",
"summary": str, "needs_fingerspelling_hint": bool}]}
Use an empty summary when kind is none."""

_INSPECTOR_SPEC = StructuredSpec(
    fields=(
        FieldSpec(
            "notes",
            "list",
            item=FieldSpec(
                "note",
                "dict",
                fields=(
                    FieldSpec("line_index", "int"),
                    FieldSpec("kind", "str", enum=("poetic", "cultural", "mismatch", "none")),
                    FieldSpec("summary", "str"),
                    FieldSpec("needs_fingerspelling_hint", "bool"),
                ),
            ),
        ),
    ),
    max_retries=2,
)


def inspect_lines(
    provider: ChatProvider,
    lines: Sequence[BatchLine],
    metadata: dict[str, Any],
    batch_size: int = 10,
) -> list[ChallengeNote]:
    """One note per line; kind=none means nothing noteworthy."""
    notes: dict[int, ChallengeNote] = {}
    for batch in make_batches(lines, batch_size):
        values = inspector_values(batch, metadata)
        wanted = {b.index for b in batch}

        def check(record: dict, wanted=wanted) -> list[str]:
            got = {n["line_index"] for n in record["notes"]}
            if got != wanted:
                return [f"notes must cover exactly lines {sorted(wanted)}, got {sorted(got)}"]
            return []

        try:
            record = _run_batch(
                provider, "line_inspector", _INSPECTOR_SYSTEM, values, _INSPECTOR_SPEC, check
            )
        except ValidationExhausted as exc:
            raise StageError("line_inspector", sorted(wanted), exc) from exc
        for entry in record["notes"]:
            kind = ChallengeKind(entry["kind"])
            notes[entry["line_index"]] = ChallengeNote(
                line_index=entry["line_index"],
                kind=kind,
                summary=entry["summary"] if kind is not ChallengeKind.NONE else "",
                needs_fingerspelling_hint=(
                    entry["needs_fingerspelling_hint"]
                    if kind is not ChallengeKind.NONE
                    else False
                ),
            )
    return [notes[line.index] for line in lines]


# --- stage D: base gloss generator ----------------------------------------------

_BASE_GLOSS_SYSTEM = """\
You translate song lyric lines into sign language gloss (capitalized sign
words in signing order; [bracketed] non-manual signals; classifier tokens
like CL-5 (descriptor); fingerspelling as F-S 'L-E-T-T-E-R-S'). Respect the
requested sign language: ASL uses ASL grammar order, PSE follows English
order. Use the inspector notes to handle flagged lines. Reply with JSON
only: {"glosses": [{"line_index": int, "gloss": str}]}"""

_BASE_GLOSS_SPEC = StructuredSpec(
    fields=(
        FieldSpec(
            "glosses",
            "list",
            item=FieldSpec(
                "entry",
                "dict",
                fields=(
                    FieldSpec("line_index", "int"),
                    FieldSpec("gloss", "str", non_empty=True),
                ),
            ),
        ),
    ),
    max_retries=2,
)


def _grammar_errors(pairs: dict[int, str]) -> dict[int, str]:
    failures: dict[int, str] = {}
    for index, gloss in pairs.items():
        try:
            tokenize_gloss(gloss)
        except UnbalancedBracket as exc:
            failures[index] = str(exc)
    return failures


def generate_base_gloss(
    provider: ChatProvider,
    lines: Sequence[BatchLine],
    notes: Sequence[ChallengeNote],
    sign_language: str,
    metadata: dict[str, Any],
    batch_size: int = 10,
) -> dict[int, str]:
    """A parseable, non-empty gloss for every line."""
    note_by_line = {n.line_index: n for n in notes}
    out: dict[int, str] = {}
    for batch in make_batches(lines, batch_size):
        values = base_gloss_values(batch, note_by_line, sign_language, metadata)
        wanted = {b.index for b in batch}

        def check(record: dict, wanted=wanted) -> list[str]:
            pairs = {g["line_index"]: g["gloss"] for g in record["glosses"]}
            if set(pairs) != wanted:
                return [f"glosses must cover exactly lines {sorted(wanted)}"]
            failures = _grammar_errors(pairs)
            if failures:
                return [
                    f"line {index}: gloss does not parse ({reason})"
                    for index, reason in sorted(failures.items())
                ]
            return []

        try:
            # grammar violations get exactly one re-prompt, then fail the batch
            record = _run_batch(
                provider,
                "base_gloss",
                _BASE_GLOSS_SYSTEM,
                values,
                _BASE_GLOSS_SPEC,
                check,
                domain_retries=1,
            )
        except ValidationExhausted as exc:
            if any("does not parse" in e for e in exc.errors):
                raise UnparseableGloss(
                    "base_gloss",
                    {i: "unparseable" for i in sorted(wanted)},
                ) from exc
            raise StageError("base_gloss", sorted(wanted), exc) from exc
        for entry in record["glosses"]:
            out[entry["line_index"]] = entry["gloss"]
    return out


# --- stage F: performance guide generator -----------------------------------------

_GUIDE_SYSTEM = """\
You coach sign language performers. For each glossed lyric line, suggest the
mood as 1-5 hashtags (each starting with '#') and one performance guide
covering facial expression, body language, and pacing, at most 500
characters. Reply with JSON only:
{"guides": [{"line_index": int, "mood_hashtags": [str], "performance_guide": str}]}"""

_GUIDE_SPEC = StructuredSpec(
    fields=(
        FieldSpec(
            "guides",
            "list",
            item=FieldSpec(
                "entry",
                "dict",
                fields=(
                    FieldSpec("line_index", "int"),
                    FieldSpec(
                        "mood_hashtags",
                        "list",
                        min_items=1,
                        max_items=5,
                        item=FieldSpec("tag", "str", starts_with="#"),
                    ),
                    FieldSpec("performance_guide", "str", non_empty=True),
                ),
            ),
        ),
    ),
    max_retries=2,
)


def _truncate_guide(text: str, limit: int = MAX_GUIDE_CHARS) -> str:
    if len(text) <= limit:
        return text
    head = text[:limit]
    cut = max(head.rfind(". "), head.rfind("! "), head.rfind("? "))
    if cut > 0:
        return head[: cut + 1]
    return head.rstrip()


def generate_performance_guides(
    provider: ChatProvider,
    lines: Sequence[BatchLine],
    glosses: dict[int, str],
    notes: Sequence[ChallengeNote],
    metadata: dict[str, Any],
    batch_size: int = 10,
) -> dict[int, tuple[tuple[str, ...], str]]:
    note_by_line = {n.line_index: n for n in notes}
    out: dict[int, tuple[tuple[str, ...], str]] = {}
    for batch in make_batches(lines, batch_size):
        values = guide_values(batch, glosses, note_by_line, metadata)
        wanted = {b.index for b in batch}

        def check(record: dict, wanted=wanted) -> list[str]:
            got = {g["line_index"] for g in record["guides"]}
            if got != wanted:
                return [f"guides must cover exactly lines {sorted(wanted)}"]
            return []

        try:
            record = _run_batch(
                provider, "performance_guide", _GUIDE_SYSTEM, values, _GUIDE_SPEC, check
            )
        except ValidationExhausted as exc:
            raise StageError("performance_guide", sorted(wanted), exc) from exc
        for entry in record["guides"]:
            out[entry["line_index"]] = (
                tuple(entry["mood_hashtags"]),
                _truncate_guide(entry["performance_guide"]),
            )
    return out


# --- stage H: alternative gloss generator -----------------------------------------

_ALTERNATIVES_SYSTEM = """\
You propose alternative sign language glosses. For each line produce three
variants of the base gloss: a shorter version (fewer tokens), an alternative
of similar length, and a longer, more expressive version. Every variant must
follow gloss notation and be non-empty. Token counts must satisfy
shorter <= base_alt <= longer. Reply with JSON only:
{"alternatives": [{"line_index": int, "shorter": str, "base_alt": str, "longer": str}]}"""

_ALTERNATIVES_SPEC = StructuredSpec(
    fields=(
        FieldSpec(
            "alternatives",
            "list",
            item=FieldSpec(
                "entry",
                "dict",
                fields=(
                    FieldSpec("line_index", "int"),
                    FieldSpec("shorter", "str", non_empty=True),
                    FieldSpec("base_alt", "str", non_empty=True),
                    FieldSpec("longer", "str", non_empty=True),
                ),
            ),
        ),
    ),
    max_retries=2,
)


def _token_count(gloss: str) -> int:
    tokens = tokenize_gloss(gloss)
    m = gloss_metrics(tokens)
    return m.sign_count + m.nms_count


def generate_alternatives(
    provider: ChatProvider,
    lines: Sequence[BatchLine],
    glosses: dict[int, str],
    notes: Sequence[ChallengeNote],
    metadata: dict[str, Any],
    batch_size: int = 10,
) -> dict[int, AltGlosses]:
    """Three grammar-clean variants per line, ordered by total token count."""
    note_by_line = {n.line_index: n for n in notes}
    out: dict[int, AltGlosses] = {}
    for batch in make_batches(lines, batch_size):
        values = alternatives_values(batch, glosses, note_by_line, metadata)
        wanted = {b.index for b in batch}

        def check(record: dict, wanted=wanted) -> list[str]:
            errors: list[str] = []
            entries = {e["line_index"]: e for e in record["alternatives"]}
            if set(entries) != wanted:
                return [f"alternatives must cover exactly lines {sorted(wanted)}"]
            for index, entry in sorted(entries.items()):
                try:
                    counts = [
                        _token_count(entry["shorter"]),
                        _token_count(entry["base_alt"]),
                        _token_count(entry["longer"]),
                    ]
                    base_count = _token_count(glosses.get(index, ""))
                except UnbalancedBracket as exc:
                    errors.append(f"line {index}: variant does not parse ({exc})")
                    continue
                if not counts[0] <= counts[1] <= counts[2]:
                    errors.append(
                        f"line {index}: token counts must be ordered "
                        f"shorter <= base_alt <= longer, got {counts}"
                    )
                # "shorter" must actually shorten the base (when possible)
                if base_count > 1 and counts[0] >= base_count:
                    errors.append(
                        f"line {index}: shorter variant has {counts[0]} tokens "
                        f"but the base gloss has {base_count}"
                    )
                if counts[2] < base_count:
                    errors.append(
                        f"line {index}: longer variant has fewer tokens than the base"
                    )
            return errors

        try:
            record = _run_batch(
                provider, "alternative_gloss", _ALTERNATIVES_SYSTEM, values,
                _ALTERNATIVES_SPEC, check,
            )
        except ValidationExhausted as exc:
            raise StageError("alternative_gloss", sorted(wanted), exc) from exc
        for entry in record["alternatives"]:
            out[entry["line_index"]] = AltGlosses(
                shorter=entry["shorter"],
                base_alt=entry["base_alt"],
                longer=entry["longer"],
            )
    return out
