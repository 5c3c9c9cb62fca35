"""Preprocessing orchestration: runs the four stages in order, persisting
stage artifacts so re-runs resume from the first stage whose inputs changed."""

from __future__ import annotations

from typing import TYPE_CHECKING

from ..core import ProjectStatus
from ..llm import ChatProvider
from ..llm.provider import stable_hash
from .models import AltGlosses, ChallengeNote, LineAnnotation
from .stages import (
    BatchLine,
    generate_alternatives,
    generate_base_gloss,
    generate_performance_guides,
    inspect_lines,
)

if TYPE_CHECKING:
    from ..store import Store

__all__ = ["run_preprocess", "PreprocessFailed"]


class PreprocessFailed(Exception):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"preprocessing failed at stage {stage}: {cause}")
        self.stage = stage
        self.cause = cause


def _stage_cached(store: "Store", project_id: str, stage: str, input_hash: str):
    artifact = store.load_stage_artifact(project_id, stage)
    if artifact is not None and artifact[0] == input_hash:
        return artifact[1]
    return None


def run_preprocess(
    store: "Store",
    provider: ChatProvider,
    project_id: str,
    batch_size: int = 10,
    on_stage_done=None,
) -> list[LineAnnotation]:
    """Run stages strictly in order; idempotent under a deterministic provider.

    A stage failure marks the project failed at that stage but keeps every
    earlier stage's artifact, so a later run resumes where it stopped.
    """
    project = store.load_project(project_id)
    timed = store.load_timed_lyric(project_id)
    if project.status is not ProjectStatus.PREPROCESSING:
        store.update_project_status(project_id, ProjectStatus.PREPROCESSING)
    lines = [BatchLine(line.index, line.section, line.text) for line in timed.lines]
    metadata = {
        "title": project.title,
        "artist": project.artist,
        "description": project.song_description,
        "sign_language": project.sign_language.value,
        "nickname": project.user_profile.nickname,
        "proficiency": project.user_profile.proficiency.value,
    }
    lines_payload = [
        {"index": b.index, "section": b.section, "text": b.text} for b in lines
    ]

    def fail(stage: str, cause: Exception) -> PreprocessFailed:
        store.update_project_status(project_id, ProjectStatus.FAILED)
        return PreprocessFailed(stage, cause)

    # B: line inspector
    stage = "line_inspector"
    inspector_hash = stable_hash({"lines": lines_payload, "metadata": metadata})
    cached = _stage_cached(store, project_id, stage, inspector_hash)
    if cached is None:
        try:
            notes = inspect_lines(provider, lines, metadata, batch_size)
        except Exception as exc:
            raise fail(stage, exc) from exc
        store.save_stage_artifact(
            project_id, stage, inspector_hash, [n.to_dict() for n in notes]
        )
    else:
        notes = [ChallengeNote.from_dict(d) for d in cached]
    if on_stage_done:
        on_stage_done(stage)

    # D: base gloss generator (consumes C)
    stage = "base_gloss"
    base_hash = stable_hash(
        {
            "lines": lines_payload,
            "notes": [n.to_dict() for n in notes],
            "sign_language": project.sign_language.value,
        }
    )
    cached = _stage_cached(store, project_id, stage, base_hash)
    if cached is None:
        try:
            glosses = generate_base_gloss(
                provider, lines, notes, project.sign_language.value, metadata, batch_size
            )
        except Exception as exc:
            raise fail(stage, exc) from exc
        store.save_stage_artifact(
            project_id, stage, base_hash, {str(k): v for k, v in glosses.items()}
        )
    else:
        glosses = {int(k): v for k, v in cached.items()}
    if on_stage_done:
        on_stage_done(stage)

    # F: performance guide generator (consumes E and C)
    stage = "performance_guide"
    guide_hash = stable_hash(
        {
            "glosses": {str(k): v for k, v in sorted(glosses.items())},
            "notes": [n.to_dict() for n in notes],
        }
    )
    cached = _stage_cached(store, project_id, stage, guide_hash)
    if cached is None:
        try:
            guides = generate_performance_guides(
                provider, lines, glosses, notes, metadata, batch_size
            )
        except Exception as exc:
            raise fail(stage, exc) from exc
        store.save_stage_artifact(
            project_id,
            stage,
            guide_hash,
            {str(k): {"mood_hashtags": list(v[0]), "performance_guide": v[1]} for k, v in guides.items()},
        )
    else:
        guides = {
            int(k): (tuple(v["mood_hashtags"]), v["performance_guide"])
            for k, v in cached.items()
        }
    if on_stage_done:
        on_stage_done(stage)

    # H: alternative gloss generator (consumes E and C)
    stage = "alternative_gloss"
    alt_hash = stable_hash(
        {
            "glosses": {str(k): v for k, v in sorted(glosses.items())},
            "notes": [n.to_dict() for n in notes],
        }
    )
    cached = _stage_cached(store, project_id, stage, alt_hash)
    if cached is None:
        try:
            alternatives = generate_alternatives(
                provider, lines, glosses, notes, metadata, batch_size
            )
        except Exception as exc:
            raise fail(stage, exc) from exc
        store.save_stage_artifact(
            project_id,
            stage,
            alt_hash,
            {
                str(k): {"shorter": v.shorter, "base_alt": v.base_alt, "longer": v.longer}
                for k, v in alternatives.items()
            },
        )
    else:
        alternatives = {
            int(k): AltGlosses(v["shorter"], v["base_alt"], v["longer"])
            for k, v in cached.items()
        }
    if on_stage_done:
        on_stage_done(stage)

    annotations = [
        LineAnnotation(
            line_index=line.index,
            challenge=notes[position],
            base_gloss=glosses[line.index],
            alt_glosses=alternatives[line.index],
            mood_hashtags=guides[line.index][0],
            performance_guide=guides[line.index][1],
        )
        for position, line in enumerate(lines)
    ]
    store.save_annotations(project_id, annotations)
    store.update_project_status(project_id, ProjectStatus.READY)
    return annotations
