"""Reference-lyrics documents: one line per row, [Section] header rows."""

from __future__ import annotations

from dataclasses import dataclass

from .subtitles import EmptyDocument

__all__ = ["LyricsDocument", "LyricsSection", "parse_lyrics"]


@dataclass(frozen=True)
class LyricsSection:
    label: str
    lines: tuple[str, ...]


@dataclass(frozen=True)
class LyricsDocument:
    sections: tuple[LyricsSection, ...]

    def flat_lines(self) -> list[tuple[str, str]]:
        """(section label, line text) in document order."""
        return [(s.label, line) for s in self.sections for line in s.lines]

    @property
    def line_count(self) -> int:
        return sum(len(s.lines) for s in self.sections)


def _is_header(row: str) -> bool:
    stripped = row.strip()
    return len(stripped) > 2 and stripped.startswith("[") and stripped.endswith("]")


def parse_lyrics(data: str) -> LyricsDocument:
    """Header rows like "[Verse 1]" open sections; empty sections are dropped.

    Headerless documents get one "Body" section. Repeated header labels are
    disambiguated with a counter so labels stay unique.
    """
    sections: list[tuple[str, list[str]]] = []
    current_label = None
    current_lines: list[str] = []

    def flush():
        if current_label is not None and current_lines:
            sections.append((current_label, current_lines.copy()))

    for row in data.splitlines():
        if _is_header(row):
            flush()
            current_label = row.strip()[1:-1].strip()
            current_lines = []
        elif row.strip():
            if current_label is None:
                current_label = "Body"
            current_lines.append(row.strip())
    flush()

    if not sections:
        raise EmptyDocument("no lyric lines found")

    seen: dict[str, int] = {}
    unique: list[LyricsSection] = []
    for label, lines in sections:
        seen[label] = seen.get(label, 0) + 1
        name = label if seen[label] == 1 else f"{label} ({seen[label]})"
        unique.append(LyricsSection(name, tuple(lines)))
    return LyricsDocument(tuple(unique))
