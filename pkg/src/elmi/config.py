"""Runtime configuration from environment variables."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

__all__ = ["Config", "load_config"]


@dataclass(frozen=True)
class Config:
    db_path: Path
    fixtures_dir: Path
    mock_table: Path = Path("fixtures/mock_llm.json")
    provider: str = "mock"  # mock | http
    live_mode: bool = False
    lyrics_api_key: str = ""
    media_cookie_file: str = ""
    asr_api_key: str = ""
    llm_base_url: str = ""
    llm_api_key: str = ""
    llm_model: str = ""
    fuzzy_threshold: float = 0.60
    word_substitution_threshold: float = 0.50
    asr_concurrency: int = 4
    requests_per_minute: int = 60


def load_config(env: dict[str, str] | None = None) -> Config:
    env = dict(os.environ if env is None else env)
    fixtures_dir = Path(env.get("ELMI_FIXTURES_DIR", "fixtures"))
    return Config(
        db_path=Path(env.get("ELMI_DB", "elmi.db")),
        fixtures_dir=fixtures_dir,
        mock_table=Path(env.get("ELMI_MOCK_TABLE", str(fixtures_dir / "mock_llm.json"))),
        provider=env.get("ELMI_PROVIDER", "mock"),
        live_mode=env.get("ELMI_LIVE", "0") == "1",
        lyrics_api_key=env.get("LYRICS_API_KEY", ""),
        media_cookie_file=env.get("MEDIA_COOKIE_FILE", ""),
        asr_api_key=env.get("ASR_API_KEY", ""),
        llm_base_url=env.get("ELMI_LLM_BASE_URL", ""),
        llm_api_key=env.get("ELMI_LLM_API_KEY", ""),
        llm_model=env.get("ELMI_LLM_MODEL", "gpt-4o"),
        fuzzy_threshold=float(env.get("ELMI_FUZZY_THRESHOLD", "0.60")),
        word_substitution_threshold=float(env.get("ELMI_WORD_SUB_THRESHOLD", "0.50")),
        asr_concurrency=int(env.get("ELMI_ASR_CONCURRENCY", "4")),
        requests_per_minute=int(env.get("ELMI_RPM", "60")),
    )
