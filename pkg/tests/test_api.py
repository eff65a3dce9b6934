import pytest
from fastapi.testclient import TestClient

from app.main import app
from tests.conftest import CHOICES, DESK, ECHO, PAIR

BULK = """
system bulk mode=exhaustive input=1 output=1 output_convention=events
neuron 1 spikes=7 { rule "(s^2)*s" / 2 -> 1 ; 1 }
"""


@pytest.fixture
def client():
    return TestClient(app)


def test_health(client):
    assert client.get("/health").json() == {"status": "ok"}
    ready = client.get("/ready").json()
    assert ready["status"] == "ready"
    assert ready["verify_workers"] >= 1


def test_validate_reports_kind(client):
    body = client.post("/systems/validate", json={"source": DESK}).json()
    assert body == {"valid": True, "kind": "tm", "name": "desk", "problems": []}


def test_validate_reports_position(client):
    body = client.post("/systems/validate", json={"source": "system x input=1\nneuron 1 { }\n"}).json()
    assert body["valid"] is False
    assert body["problems"][0]["line"] == 1


def test_run_gap_output(client):
    response = client.post("/systems/run", json={"source": PAIR, "trace": True})
    assert response.status_code == 200
    body = response.json()
    assert body["output"] == 1
    assert body["output_events"] == [[2, 1], [3, 1]]
    assert body["halt_reason"] == "quiescent"
    assert [r["t"] for r in body["trace"]] == [1, 2, 3]
    assert body["trace"][0]["contents"] == ["2", "0"]
    assert body["trace"][0]["firings"] == [[1, "1"]]
    assert body["trace"][1]["output"] == "1"


def test_run_with_schedule(client):
    body = client.post("/systems/run", json={"source": ECHO, "schedule": {"1": 1, "4": 1}}).json()
    assert body["output"] == 3


def test_run_events_stop_at_first_emission(client):
    body = client.post("/systems/run", json={"source": BULK}).json()
    assert body["output"] == 3
    assert body["halt_reason"] == "output"


def test_strict_violation_is_a_conflict(client):
    response = client.post("/systems/run", json={"source": CHOICES, "policy": "strict"})
    assert response.status_code == 409


def test_run_rejects_other_documents(client):
    response = client.post("/systems/run", json={"source": DESK})
    assert response.status_code == 400


def test_syntax_error_carries_line(client):
    response = client.post("/systems/run", json={"source": "system x input=1 output=1\nneuron 1 { rule s }\n"})
    assert response.status_code == 400
    assert response.json()["detail"]["line"] == 2


def test_encode(client):
    body = client.post("/machines/encode", json={"source": DESK, "tape": [1]}).json()
    assert (body["X"], body["Y"], body["code"], body["z"], body["period"]) == (16, 16, 5, 16, 13)
    assert body["schedule"] == {"1": 18, "2": 16, "4": 5}


def test_encode_rejects_head_outside_tape(client):
    response = client.post("/machines/encode", json={"source": DESK, "tape": [1], "head": 3})
    assert response.status_code == 400


def test_encode_rejects_unknown_symbols(client):
    response = client.post("/machines/encode", json={"source": DESK, "tape": [3]})
    assert response.status_code == 400


def test_universal_text(client):
    body = client.post("/machines/universal", json={"source": DESK}).json()
    assert body["name"] == "desk-universal"
    assert body["neurons"] == 10
    assert body["text"].startswith("system desk-universal mode=exhaustive")
    assert body["overlaps"] == []


def test_input_encoder_with_word(client):
    body = client.post("/machines/input-encoder", json={"source": DESK, "cells": [1, 2]}).json()
    assert body["neurons"] == 6
    assert body["schedule"] == {"1": 1, "5": 3, "9": 2}
    assert (body["expected_time"], body["expected_spikes"]) == (11, 304)


def test_verify(client):
    response = client.post("/machines/verify", json={"source": DESK, "tape": [1], "steps": 3})
    assert response.status_code == 200
    body = response.json()
    assert body["ok"] and body["halted"]
    assert body["output"] == body["expected_output"] == [2, 1]
    assert [b["t"] for b in body["boundaries"]] == [5, 18]


def test_translate(client):
    body = client.post("/counter/translate", json={"source": PAIR}).json()
    assert (body["counters"], body["m"]) == (3, 2)
    assert body["program"].startswith("cm pair-cm counters=3 output=3")


def test_translate_exhaustive_is_unprocessable(client):
    assert client.post("/counter/translate", json={"source": BULK}).status_code == 422


def test_compare(client):
    body = client.post("/counter/compare", json={"source": ECHO, "schedule": {"1": 1, "4": 1}}).json()
    assert body["ok"]
    assert body["snp_output"] == body["cm_output"] == 3
    assert body["divergence"] is None


def test_compare_rejects_bursts(client):
    response = client.post("/counter/compare", json={"source": ECHO, "schedule": {"1": 2}})
    assert response.status_code == 422
