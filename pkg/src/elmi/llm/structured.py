"""Structured completions: JSON parsing, field validation, re-prompt retries."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from typing import Any, Optional, Sequence

from .provider import ChatExchange, ChatProvider, complete

__all__ = [
    "FieldSpec",
    "StructuredSpec",
    "StructuredResult",
    "ValidationExhausted",
    "complete_structured",
]

_FENCE_RE = re.compile(r"^```[a-zA-Z]*\n(.*)\n```$", re.DOTALL)

_TYPES = {
    "str": str,
    "int": int,
    "float": (int, float),
    "bool": bool,
    "list": list,
    "dict": dict,
}


class ValidationExhausted(Exception):
    """Every attempt failed validation; carries the last raw response."""

    def __init__(self, errors: list[str], last_raw: str, attempts: int):
        super().__init__(
            f"validation failed after {attempts} attempts: {errors}"
        )
        self.errors = errors
        self.last_raw = last_raw
        self.attempts = attempts


@dataclass(frozen=True)
class FieldSpec:
    name: str
    type: str = "str"
    required: bool = True
    enum: Optional[tuple[str, ...]] = None
    item: Optional["FieldSpec"] = None  # element spec when type == "list"
    fields: Optional[tuple["FieldSpec", ...]] = None  # nested record spec
    min_items: Optional[int] = None  # list length bounds
    max_items: Optional[int] = None
    starts_with: Optional[str] = None  # required string prefix
    non_empty: bool = False


@dataclass(frozen=True)
class StructuredSpec:
    fields: tuple[FieldSpec, ...]
    max_retries: int = 2

    def __post_init__(self) -> None:
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")

    def validate(self, record: Any) -> list[str]:
        if not isinstance(record, dict):
            return [f"expected a JSON object, got {type(record).__name__}"]
        return _validate_fields(record, self.fields, path="")


def _validate_fields(
    record: dict, specs: Sequence[FieldSpec], path: str
) -> list[str]:
    errors: list[str] = []
    for spec in specs:
        label = f"{path}{spec.name}"
        if spec.name not in record:
            if spec.required:
                errors.append(f"missing required field '{label}'")
            continue
        errors.extend(_validate_value(record[spec.name], spec, label))
    return errors


def _validate_value(value: Any, spec: FieldSpec, label: str) -> list[str]:
    expected = _TYPES[spec.type]
    if spec.type == "float" and isinstance(value, bool):
        return [f"field '{label}' must be a number"]
    if spec.type == "int" and isinstance(value, bool):
        return [f"field '{label}' must be an integer"]
    if not isinstance(value, expected):
        return [f"field '{label}' must be {spec.type}, got {type(value).__name__}"]
    errors: list[str] = []
    if spec.enum is not None and value not in spec.enum:
        errors.append(f"field '{label}' must be one of {list(spec.enum)}, got {value!r}")
    if spec.type == "str":
        if spec.non_empty and not value.strip():
            errors.append(f"field '{label}' must be non-empty")
        if spec.starts_with is not None and not value.startswith(spec.starts_with):
            errors.append(f"field '{label}' must start with {spec.starts_with!r}")
    if spec.type == "list":
        if spec.min_items is not None and len(value) < spec.min_items:
            errors.append(f"field '{label}' needs at least {spec.min_items} items")
        if spec.max_items is not None and len(value) > spec.max_items:
            errors.append(f"field '{label}' allows at most {spec.max_items} items")
        if spec.item is not None:
            for position, element in enumerate(value):
                errors.extend(_validate_value(element, spec.item, f"{label}[{position}]"))
    if spec.type == "dict" and spec.fields is not None:
        errors.extend(_validate_fields(value, spec.fields, path=f"{label}."))
    return errors


@dataclass(frozen=True)
class StructuredResult:
    record: dict
    retries_used: int


def _parse_json_object(text: str) -> Any:
    stripped = text.strip()
    fence = _FENCE_RE.match(stripped)
    if fence:
        stripped = fence.group(1).strip()
    return json.loads(stripped)


def complete_structured(
    provider: ChatProvider, exchange: ChatExchange, spec: StructuredSpec
) -> StructuredResult:
    """Valid record or ValidationExhausted after max_retries + 1 attempts.

    Each failed attempt re-prompts with the validation error appended to
    the dialogue, so a capable provider can self-correct.
    """
    current = exchange
    last_raw = ""
    last_errors: list[str] = []
    attempts = spec.max_retries + 1
    for attempt in range(attempts):
        last_raw = complete(provider, current)
        try:
            record = _parse_json_object(last_raw)
            errors = spec.validate(record)
        except (json.JSONDecodeError, ValueError) as exc:
            errors = [f"response is not valid JSON: {exc}"]
            record = None
        if not errors:
            # the returned record must satisfy its own spec
            assert spec.validate(record) == []
            return StructuredResult(record=record, retries_used=attempt)
        last_errors = errors
        if attempt + 1 < attempts:
            correction = (
                "The previous response failed validation: "
                + "; ".join(errors)
                + ". Respond again with corrected JSON only."
            )
            if current.history and current.history[-1][0] == "user":
                appended = (("assistant", last_raw), ("user", correction))
            else:
                # keep role alternation when there is no prior user turn
                appended = (
                    ("user", f"(Previous response: {last_raw})\n{correction}"),
                )
            current = replace(current, history=current.history + appended)
    raise ValidationExhausted(last_errors, last_raw, attempts)
