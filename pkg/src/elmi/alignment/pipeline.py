"""End-to-end alignment: subtitles -> line spans -> per-line ASR -> words."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

from ..clients import ClientSet, SongQuery, call_with_retries
from ..core import LyricLine, ProjectStatus, SongProject, TimedLyric, TimedWord
from ..textsources import parse_subtitles
from .matcher import LineMatch, LlmFallback, MatchMethod, match_cues_to_lines
from .spans import derive_line_spans
from .words import align_words

if TYPE_CHECKING:
    from ..store import Store

__all__ = ["AlignmentReport", "build_timed_lyrics"]


@dataclass(frozen=True)
class AlignmentReport:
    lines_total: int
    lines_matched: int
    words_total: int
    words_matched: int
    methods: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "lines_total": self.lines_total,
            "lines_matched": self.lines_matched,
            "words_total": self.words_total,
            "words_matched": self.words_matched,
            "methods": dict(self.methods),
        }


def build_timed_lyrics(
    project: SongProject,
    clients: ClientSet,
    store: Optional["Store"] = None,
    fuzzy_threshold: float = 0.60,
    word_substitution_threshold: float = 0.50,
    asr_concurrency: int = 4,
    llm_fallback: Optional[LlmFallback] = None,
) -> tuple[TimedLyric, AlignmentReport]:
    """Deterministic given deterministic clients. When a store is supplied
    the result is persisted; failures mark the project failed before
    re-raising."""
    try:
        timed, report, description, video_url = _run(
            project,
            clients,
            fuzzy_threshold,
            word_substitution_threshold,
            asr_concurrency,
            llm_fallback,
        )
    except Exception:
        if store is not None:
            current = store.load_project(project.id)
            if current.status is ProjectStatus.PREPROCESSING:
                store.update_project_status(project.id, ProjectStatus.FAILED)
        raise
    if store is not None:
        store.save_timed_lyric(project.id, timed)
        store.save_alignment_report(project.id, report.to_dict())
        if description:
            store.update_project_description(project.id, description)
        if video_url:
            store.update_project_video_url(project.id, video_url)
    return timed, report


def _run(
    project: SongProject,
    clients: ClientSet,
    fuzzy_threshold: float,
    word_substitution_threshold: float,
    asr_concurrency: int,
    llm_fallback: Optional[LlmFallback],
) -> tuple[TimedLyric, AlignmentReport, str, str]:
    query = SongQuery(project.title, project.artist)
    doc, description = call_with_retries(lambda: clients.lyrics.fetch(query))
    bundle = call_with_retries(lambda: clients.media.fetch(query))
    parsed = parse_subtitles(bundle.subtitle_data, bundle.subtitle_format)
    cues = list(parsed.cues)

    matches = match_cues_to_lines(cues, doc, fuzzy_threshold, llm_fallback)
    flat = doc.flat_lines()
    spans = derive_line_spans(matches, cues, [text for _, text in flat])

    duration = bundle.audio.duration_ms

    def transcribe(index: int) -> list:
        span = spans[index]
        assert span is not None
        start = max(0, min(span[0], duration - 1))
        end = max(start + 1, min(span[1], duration))
        return call_with_retries(
            lambda: clients.asr.transcribe_segment(bundle.audio, start, end)
        )

    spanned = [i for i in range(len(flat)) if spans[i] is not None]
    with ThreadPoolExecutor(max_workers=max(1, asr_concurrency)) as pool:
        asr_by_line = dict(zip(spanned, pool.map(transcribe, spanned)))

    lines: list[LyricLine] = []
    for index, (section, text) in enumerate(flat):
        span = spans[index]
        if span is None:
            lines.append(LyricLine(index, section, text, None, ()))
            continue
        words = align_words(
            text, span, asr_by_line[index], word_substitution_threshold
        )
        lines.append(LyricLine(index, section, text, span, tuple(words)))

    timed = TimedLyric(tuple(lines))
    report = _report(matches, timed)
    return timed, report, description, bundle.video_url


def _report(matches: list[LineMatch], timed: TimedLyric) -> AlignmentReport:
    methods: dict[str, int] = {}
    for match in matches:
        methods[match.method.value] = methods.get(match.method.value, 0) + 1
    words = [w for line in timed.lines for w in line.words]
    return AlignmentReport(
        lines_total=len(timed.lines),
        lines_matched=sum(
            1 for m in matches if m.method is not MatchMethod.INTERPOLATED
        ),
        words_total=len(words),
        words_matched=sum(1 for w in words if w.matched),
        methods=methods,
    )
