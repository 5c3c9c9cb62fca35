"""Prompt templates with {{placeholder}} slots."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

logger = logging.getLogger(__name__)

__all__ = ["PromptTemplate", "MissingPlaceholder", "render"]

_PLACEHOLDER_RE = re.compile(r"\{\{([^{}]+)\}\}")


class MissingPlaceholder(ValueError):
    def __init__(self, names: set[str]):
        super().__init__(f"missing required placeholders: {sorted(names)}")
        self.names = names


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    body: str
    required_placeholders: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        present = {m.group(1).strip() for m in _PLACEHOLDER_RE.finditer(self.body)}
        absent = set(self.required_placeholders) - present
        if absent:
            raise ValueError(
                f"template {self.id}: required placeholders not in body: {sorted(absent)}"
            )


def render(template: PromptTemplate, values: dict[str, str]) -> str:
    """Replace every known {{name}}; unknown placeholders stay verbatim.

    Raises MissingPlaceholder when a required name has no value. Unknown
    placeholders (present in the body, not required, no value supplied)
    are left as-is and logged as warnings.
    """
    missing = set(template.required_placeholders) - set(values)
    if missing:
        raise MissingPlaceholder(missing)

    unknown: list[str] = []

    def substitute(match: re.Match) -> str:
        name = match.group(1).strip()
        if name in values:
            return str(values[name])
        unknown.append(name)
        return match.group(0)

    result = _PLACEHOLDER_RE.sub(substitute, template.body)
    for name in unknown:
        logger.warning("template %s: unknown placeholder {{%s}} left verbatim", template.id, name)
    return result
