"""Command line interface; shares the service's application layer."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from ..analysis import STAGES
from ..clients import build_clients
from ..config import Config, load_config
from ..core import (
    MediaRefs,
    Proficiency,
    ProjectStatus,
    SignLanguage,
    SongProject,
    UserProfile,
)
from ..llm import ChatProvider, HttpProvider, MockProvider
from ..store import Store
from .analytics import corpus_analytics, project_analytics
from .jobs import run_alignment_job, run_preprocess_job

__all__ = ["main"]


def _build_provider(config: Config) -> ChatProvider:
    if config.provider == "http":
        return HttpProvider(
            base_url=config.llm_base_url,
            api_key=config.llm_api_key,
            model=config.llm_model,
            requests_per_minute=config.requests_per_minute,
        )
    if Path(config.mock_table).exists():
        return MockProvider.from_json(config.mock_table)
    return MockProvider()


def _context() -> tuple[Config, Store]:
    config = load_config()
    return config, Store(config.db_path)


@click.group()
def main() -> None:
    """Song-signing translation workbench."""


@main.command()
@click.option("--title", required=True)
@click.option("--artist", required=True)
@click.option(
    "--sign-language",
    type=click.Choice([s.value for s in SignLanguage]),
    default="ASL",
    show_default=True,
)
@click.option("--nickname", default="signer", show_default=True)
@click.option(
    "--proficiency",
    type=click.Choice([p.value for p in Proficiency]),
    default="moderate",
    show_default=True,
)
@click.option("--project-id", default=None, help="Defaults to a slug of the title.")
def ingest(title, artist, sign_language, nickname, proficiency, project_id):
    """Create a project and run the alignment pipeline on fixtures."""
    config, store = _context()
    clients = build_clients(config)
    project_id = project_id or "-".join(title.lower().split())
    project = SongProject(
        id=project_id,
        title=title,
        artist=artist,
        sign_language=SignLanguage(sign_language),
        user_profile=UserProfile(nickname, Proficiency(proficiency)),
        media=MediaRefs(),
        status=ProjectStatus.CREATED,
    )
    store.save_project(project)
    run_alignment_job(
        store,
        clients,
        project_id,
        fuzzy_threshold=config.fuzzy_threshold,
        word_substitution_threshold=config.word_substitution_threshold,
        asr_concurrency=config.asr_concurrency,
    )
    report = store.load_alignment_report(project_id)
    click.echo(f"project {project_id} ingested")
    click.echo(json.dumps(report, indent=2))


@main.command()
@click.argument("project_id")
@click.option(
    "--from-stage",
    type=click.Choice(STAGES),
    default=None,
    help="Discard artifacts from this stage on and re-run.",
)
@click.option("--batch-size", default=10, show_default=True)
def preprocess(project_id, from_stage, batch_size):
    """Run the four-stage analysis chain for a project."""
    config, store = _context()
    provider = _build_provider(config)
    if from_stage is not None:
        position = STAGES.index(from_stage)
        for stage in STAGES[position:]:
            store.save_stage_artifact(project_id, stage, "invalidated", None)
    try:
        run_preprocess_job(store, provider, project_id, batch_size)
    except Exception as exc:
        click.echo(f"preprocess failed: {exc}", err=True)
        sys.exit(1)
    annotations = store.load_annotations(project_id)
    click.echo(f"preprocessed {len(annotations)} lines; status: "
               f"{store.load_project(project_id).status.value}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--static-dir", default="frontend/dist", show_default=True)
def serve(host, port, static_dir):
    """Serve the REST API (and the web app when built)."""
    import uvicorn

    from .app import create_app

    config, store = _context()
    clients = build_clients(config)
    provider = _build_provider(config)
    app = create_app(store, clients, provider, static_dir=Path(static_dir))
    uvicorn.run(app, host=host, port=port)


@main.command()
@click.argument("project_ids", nargs=-1, required=True)
def metrics(project_ids):
    """Per-line gloss metrics; several projects form a corpus."""
    _, store = _context()
    if len(project_ids) == 1:
        data = project_analytics(store, project_ids[0])
    else:
        data = corpus_analytics(store, list(project_ids))
    click.echo(json.dumps(data, indent=2))


@main.command()
@click.argument("project_id")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["bundle", "annotations", "timed-json", "lrc"]),
    default="bundle",
    show_default=True,
    help="bundle: all aggregates; annotations: analysis results; "
    "timed-json/lrc: timed lyrics only.",
)
def export(project_id, output, fmt):
    """Dump project data: full bundle, annotations, timed-lyric JSON, or LRC."""
    from ..alignment import to_json, to_lrc

    _, store = _context()
    if fmt == "bundle":
        text = json.dumps(store.export_bundle(project_id), indent=2, sort_keys=True)
    elif fmt == "annotations":
        annotations = [a.to_dict() for a in store.load_annotations(project_id)]
        text = json.dumps(annotations, indent=2, sort_keys=True)
    elif fmt == "timed-json":
        text = to_json(store.load_timed_lyric(project_id))
    else:
        text = to_lrc(store.load_timed_lyric(project_id))
    if output:
        Path(output).write_text(text, encoding="utf-8")
        click.echo(f"wrote {output}")
    else:
        click.echo(text)


if __name__ == "__main__":
    main()
