import json
import time
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from elmi.clients import ClientSet, FixtureAsrService, FixtureLyricsSource, FixtureMediaSource
from elmi.llm import MockProvider
from elmi.service import create_app
from elmi.store import Store

FIXTURES_DIR = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def fixture_clients():
    return ClientSet(
        lyrics=FixtureLyricsSource(FIXTURES_DIR),
        media=FixtureMediaSource(FIXTURES_DIR),
        asr=FixtureAsrService(),
    )


@pytest.fixture
def fixture_mock_table():
    with open(FIXTURES_DIR / "mock_llm.json", encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture
def service(fixture_clients, fixture_mock_table):
    store = Store(":memory:")
    provider = MockProvider(fixture_mock_table)
    app = create_app(store, fixture_clients, provider)
    client = TestClient(app, raise_server_exceptions=False)
    yield client, store, provider, app
    store.close()


def wait_until_ready(client, project_id, timeout_s=20.0):
    deadline = time.monotonic() + timeout_s
    while time.monotonic() < deadline:
        body = client.get(f"/projects/{project_id}").json()
        if body["status"] in ("ready", "failed"):
            return body
        time.sleep(0.05)
    raise TimeoutError("project never became ready")
