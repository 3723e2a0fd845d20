import json

import pytest
from fastapi.testclient import TestClient

from app.backend import app


@pytest.fixture
def client():
    return TestClient(app)


def test_index_and_health(client):
    assert client.get("/").json()["status"] == "online"
    assert client.get("/health").json()["status"] == "healthy"


def test_config_reports_budgets(client):
    body = client.get("/api/v1/config").json()
    assert body["status"] == "success"
    assert body["max_steps"] > 0
    assert "verify_depth" in body


def test_eval(client):
    body = client.post("/api/v1/eval", json={"source": "succ (succ zero)"}).json()
    assert body == {"status": "success", "type": "nat", "value": 2, "text": "nat:2"}


def test_eval_reports_errors(client):
    assert client.post("/api/v1/eval", json={"source": "succ tt"}).json()["status"] == "error"
    body = client.post("/api/v1/eval", json={"source": "fix f. f", "max_steps": 40}).json()
    assert body == {"status": "error", "message": "DIVERGED"}


def test_eval_rejects_a_non_positive_budget(client):
    assert client.post("/api/v1/eval", json={"source": "zero", "max_steps": 0}).status_code == 422


def test_trace(client):
    body = client.post("/api/v1/trace", json={"source": "succ zero"}).json()
    assert body["status"] == "success"
    assert body["trace"].splitlines()[0] == "1: qhatE_{} @init"
    assert body["snapshots"][0]["tape"].startswith("TAPE")
    assert body["truncated"] is False


def test_dump(client):
    body = client.post("/api/v1/dump", json={"source": "zero"}).json()
    assert body["status"] == "success"
    assert body["dump"].startswith("DESCRIPTION")


def test_stream_trace_ends_with_the_play(client):
    with client.stream("POST", "/api/v1/stream-trace", json={"source": "succ zero"}) as response:
        events = [json.loads(line[len("data: "):]) for line in response.iter_lines() if line.startswith("data: ")]
    assert events[0]["p_move"] == 1
    assert events[-1]["trace"].startswith("1: qhatE_{} @init")
    assert events[-1]["truncated"] is False


def test_backend_leaves_logging_to_setup(monkeypatch):
    import importlib
    import logging

    import app.backend as backend

    calls = []
    monkeypatch.setattr(logging, "basicConfig", lambda *a, **k: calls.append((a, k)))
    importlib.reload(backend)
    assert calls == []
