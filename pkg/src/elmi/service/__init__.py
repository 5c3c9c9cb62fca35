from .analytics import corpus_analytics, line_analytics, pct, project_analytics
from .app import create_app
from .jobs import JobManager, run_alignment_job, run_full_pipeline, run_preprocess_job
from .playback import PlaybackState, PlayMode, resolve_playback

__all__ = [
    "JobManager",
    "PlayMode",
    "PlaybackState",
    "corpus_analytics",
    "create_app",
    "line_analytics",
    "pct",
    "project_analytics",
    "resolve_playback",
    "run_alignment_job",
    "run_full_pipeline",
    "run_preprocess_job",
]
