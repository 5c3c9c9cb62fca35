import json

from conftest import wait_until_ready

from elmi.chat import classifier_values, turn_values
from elmi.llm import mock_key

CREATE_BODY = {
    "title": "Night Drive",
    "artist": "The City Lights",
    "sign_language": "ASL",
    "nickname": "signer",
}

LEBRON_LINE = "Jump up to the top, LeBron"


def create_ready_project(client):
    response = client.post("/projects", json=CREATE_BODY)
    assert response.status_code == 201, response.text
    project_id = response.json()["id"]
    body = wait_until_ready(client, project_id)
    assert body["status"] == "ready", body
    return project_id


def test_create_poll_ready_happy_path(service):
    client, store, provider, _ = service
    project_id = create_ready_project(client)
    body = client.get(f"/projects/{project_id}").json()
    jobs = {j["kind"]: j["status"] for j in body["jobs"]}
    assert jobs == {"alignment": "done", "preprocess": "done"}
    assert "synth-pop" in body["song_description"]
    assert body["video_url"] == "https://video.example/night-drive"


def test_lines_carry_annotations_and_noteworthy_flags(service):
    client, *_ = service
    project_id = create_ready_project(client)
    body = client.get(f"/projects/{project_id}/lines").json()
    lines = body["lines"]
    assert len(lines) == 19
    assert sum(1 for line in lines if line["noteworthy"]) == 3
    assert all(line["annotation"]["base_gloss"] for line in lines)
    assert all(line["span"] for line in lines)
    assert sum(len(line["words"]) for line in lines) == 105


def test_unknown_project_404_with_error_shape(service):
    client, *_ = service
    response = client.get("/projects/nope")
    assert response.status_code == 404
    body = response.json()
    assert set(body) == {"code", "message", "details"}
    assert body["code"] == "not_found"


def test_lines_not_ready_503(service):
    client, store, provider, app = service
    # a project saved directly, with no pipeline run
    from elmi.core import MediaRefs, SignLanguage, SongProject, UserProfile

    store.save_project(
        SongProject(
            id="bare",
            title="X",
            artist="Y",
            sign_language=SignLanguage.ASL,
            user_profile=UserProfile("n"),
        )
    )
    response = client.get("/projects/bare/lines")
    assert response.status_code == 503
    assert response.json()["code"] == "not_ready"


def test_gloss_edit_version_chain_and_conflict(service):
    client, *_ = service
    project_id = create_ready_project(client)
    url = f"/projects/{project_id}/lines/0/gloss"

    first = client.put(url, json={"raw": "GOLD LIGHT HARBOR", "expected_version": 0})
    assert first.status_code == 200
    assert first.json()["version"] == 1

    second = client.put(url, json={"raw": "GOLD LIGHT SHINE", "expected_version": 1})
    assert second.json()["version"] == 2

    stale = client.put(url, json={"raw": "STALE WRITE", "expected_version": 0})
    assert stale.status_code == 409
    assert stale.json()["code"] == "version_conflict"


def test_malformed_gloss_400(service):
    client, *_ = service
    project_id = create_ready_project(client)
    response = client.put(
        f"/projects/{project_id}/lines/0/gloss",
        json={"raw": "BAD [OPEN", "expected_version": 0},
    )
    assert response.status_code == 400
    assert response.json()["code"] == "malformed_gloss"
    assert response.json()["details"]["offset"] == 4


def test_suggestions_endpoint(service):
    client, *_ = service
    project_id = create_ready_project(client)
    response = client.get(f"/projects/{project_id}/lines/0/suggestions")
    assert response.status_code == 200
    suggestions = response.json()["suggestions"]
    assert 1 <= len(suggestions) <= 2
    # base_alt first on empty input (rotation of the base gloss)
    assert suggestions[0] == "LIGHT HARBOR TONIGHT GOLD"


def test_shortcut_message_routes_intent_without_classifier(service):
    client, store, provider, _ = service
    project_id = create_ready_project(client)
    thread = client.post(
        f"/projects/{project_id}/lines/1/thread", json={"proactive": False}
    )
    assert thread.status_code == 201
    thread_id = thread.json()["id"]

    values = turn_values(
        "emoting_base", 1, LEBRON_LINE, "[Emoting] Let's discuss this line.", 1, ""
    )
    provider.add(mock_key("emoting_base", values), "Big smile, bigger jump!")

    response = client.post(
        f"/threads/{thread_id}/messages", json={"shortcut_intent": "Emoting"}
    )
    assert response.status_code == 200
    body = response.json()
    assert body["intent"] == "Emoting"
    assert body["message"]["text"] == "Big smile, bigger jump!"
    assert provider.calls_for("intent_classifier") == []


def test_manual_message_classified(service):
    client, store, provider, _ = service
    project_id = create_ready_project(client)
    thread_id = client.post(
        f"/projects/{project_id}/lines/1/thread", json={"proactive": False}
    ).json()["id"]

    message = "what does this line mean?"
    provider.add_rendered(
        "intent_classifier", classifier_values(message), json.dumps({"intent": "Meaning"})
    )
    values = turn_values("meaning", 1, LEBRON_LINE, message, 1, "")
    provider.add(mock_key("meaning", values), "It is a playful boast. What do you see in it?")

    body = client.post(f"/threads/{thread_id}/messages", json={"text": message}).json()
    assert body["intent"] == "Meaning"
    assert len(provider.calls_for("intent_classifier")) == 1


def test_proactive_thread_opener(service):
    client, store, provider, _ = service
    project_id = create_ready_project(client)
    from elmi.chat import opener_values

    values = opener_values(
        1,
        LEBRON_LINE,
        "Names a famous basketball player; audiences unfamiliar with US "
        "sports may need context or fingerspelling.",
    )
    provider.add(
        mock_key("proactive_opener", values),
        "This line names a famous basketball player. How would you bring "
        "that reference across to your audience?",
    )
    response = client.post(
        f"/projects/{project_id}/lines/1/thread", json={"proactive": True}
    )
    assert response.status_code == 201
    messages = response.json()["messages"]
    assert len(messages) == 1
    assert messages[0]["origin"] == "proactive"
    assert messages[0]["intent"] == "Meaning"


def test_proactive_on_plain_line_400(service):
    client, *_ = service
    project_id = create_ready_project(client)
    response = client.post(
        f"/projects/{project_id}/lines/0/thread", json={"proactive": True}
    )
    assert response.status_code == 400
    assert response.json()["code"] == "not_noteworthy"


def test_double_thread_conflict(service):
    client, *_ = service
    project_id = create_ready_project(client)
    url = f"/projects/{project_id}/lines/2/thread"
    assert client.post(url, json={}).status_code == 201
    response = client.post(url, json={})
    assert response.status_code == 409
    assert response.json()["code"] == "thread_exists"


def test_playback_endpoint_and_loop_wrap(service):
    client, store, provider, _ = service
    project_id = create_ready_project(client)
    lines = client.get(f"/projects/{project_id}/lines").json()["lines"]
    span = lines[0]["span"]
    length = span[1] - span[0]

    t_inside = span[0] + length // 2
    state = client.get(
        f"/projects/{project_id}/playback", params={"t": t_inside}
    ).json()
    assert state["active_line"] == 0
    assert state["active_word"] is not None

    t_outside = span[1] + length
    wrapped = client.get(
        f"/projects/{project_id}/playback",
        params={"t": t_outside, "mode": "line_loop", "loop": 0},
    ).json()
    expected_t = (t_outside - span[0]) % length + span[0]
    assert wrapped["t_ms"] == expected_t
    assert wrapped["active_line"] == 0


def test_playback_validation_and_not_ready(service):
    client, store, provider, app = service
    project_id = create_ready_project(client)
    response = client.get(
        f"/projects/{project_id}/playback", params={"t": 0, "mode": "line_loop"}
    )
    assert response.status_code == 400


def test_analytics_endpoint(service):
    client, *_ = service
    project_id = create_ready_project(client)
    client.put(
        f"/projects/{project_id}/lines/0/gloss",
        json={"raw": "ME SAME-AS BUTTER SMOOTH", "expected_version": 0},
    )
    client.put(
        f"/projects/{project_id}/lines/0/gloss",
        json={"raw": "SMOOTH LIKE BUTTER", "expected_version": 1},
    )
    data = client.get(f"/projects/{project_id}/analytics").json()
    line0 = data["lines"][0]
    assert line0["mean_overlap"] == "66.67%"
    assert line0["mean_overlap_exact"] == [2, 3]


def test_idempotent_create_with_key(service):
    client, *_ = service
    headers = {"Idempotency-Key": "abc"}
    first = client.post("/projects", json=CREATE_BODY, headers=headers)
    second = client.post("/projects", json=CREATE_BODY, headers=headers)
    assert first.json()["id"] == second.json()["id"]
    assert second.status_code == 201


def test_idempotent_gloss_put(service):
    client, *_ = service
    project_id = create_ready_project(client)
    url = f"/projects/{project_id}/lines/3/gloss"
    headers = {"Idempotency-Key": "edit-1"}
    body = {"raw": "HOLD WHEEL", "expected_version": 0}
    first = client.put(url, json=body, headers=headers)
    # a retry with the same key returns the cached result, not a 409
    second = client.put(url, json=body, headers=headers)
    assert first.json() == second.json()
    assert second.json()["version"] == 1


def test_validation_errors_return_400(service):
    client, *_ = service
    response = client.post("/projects", json={"title": ""})
    assert response.status_code == 400
    assert response.json()["code"] == "validation"


def test_message_body_exclusive_fields(service):
    client, *_ = service
    project_id = create_ready_project(client)
    thread_id = client.post(
        f"/projects/{project_id}/lines/4/thread", json={}
    ).json()["id"]
    both = client.post(
        f"/threads/{thread_id}/messages",
        json={"text": "x", "shortcut_intent": "Meaning"},
    )
    assert both.status_code == 400
    neither = client.post(f"/threads/{thread_id}/messages", json={})
    assert neither.status_code == 400


def test_sse_event_stream(service):
    client, *_ = service
    response = client.post("/projects", json=CREATE_BODY)
    project_id = response.json()["id"]
    events = []
    with client.stream(
        "GET", f"/projects/{project_id}/events", params={"timeout_s": 15}
    ) as stream:
        for line in stream.iter_lines():
            if line.startswith("event: "):
                events.append(line.split(": ", 1)[1])
    assert "job_status" in events
    assert "stage_done" in events
    body = client.get(f"/projects/{project_id}").json()
    assert body["status"] == "ready"


def test_export_endpoint_round_trips(service):
    client, *_ = service
    project_id = create_ready_project(client)
    client.put(
        f"/projects/{project_id}/lines/0/gloss",
        json={"raw": "GOLD LIGHT", "expected_version": 0},
    )
    bundle = client.get(f"/projects/{project_id}/export").json()
    assert bundle["project"]["id"] == project_id
    assert bundle["timed_lyric"]["lines"][0]["text"].startswith("Golden light")
    assert bundle["glosses"]["0"][0]["raw"] == "GOLD LIGHT"
    assert len(bundle["annotations"]) == 19
