import json
import os
import pathlib

import pytest

import kad

DATA = pathlib.Path(os.environ.get("KAD_DATA", pathlib.Path(__file__).resolve().parents[2] / "data"))


@pytest.fixture
def hotel():
    return kad.load_bundle(DATA / "hotel")


def test_bundle_loads(hotel):
    assert hotel.rule_count > 0
    assert "has-address" in hotel.relations


def test_cross_verification_between_sessions(hotel):
    engine = kad.Engine(hotel)
    s1, s2 = engine.open_session(), engine.open_session()
    out = engine.chat(s1, "I stayed in the Holiday Inn at 150 Pine Street last night.")
    assert sorted((e["r"], e["status"]) for e in out["learned"]) == [
        ("has-address", "pending-verification"),
        ("is-a", "pending-verification"),
    ]
    out = engine.chat(s2, "hello")
    assert out["question"] == "Is there a Holiday Inn hotel at this address, 150 Pine Street?"
    out = engine.chat(s2, "yes")
    assert out["answer_consumed"]
    verified = engine.triples("verified")
    assert {"s": "Holiday Inn", "r": "has-address", "o": "150 Pine Street", "status": "verified"} in verified


def test_unknown_session_raises(hotel):
    engine = kad.Engine(hotel)
    with pytest.raises(KeyError):
        engine.chat("nobody", "hello")


def test_save_load_round_trip(hotel):
    engine = kad.Engine(hotel)
    s = engine.open_session()
    engine.chat(s, "I stayed in the Holiday Inn at 150 Pine Street last night.")
    text = engine.save()
    other = kad.Engine(hotel)
    other.load(text)
    assert other.save() == text


def test_answer_and_name_helpers():
    assert kad.interpret_answer("Yes") == "affirmative"
    assert kad.interpret_answer("no") == "negative"
    assert kad.interpret_answer("I like the service") == "other"
    assert kad.levenshtein("kitten", "sitting") == 3
    assert kad.name_similarity("Panera", "Panera Bread") == "candidate-alias"


def test_demo_simulation(hotel):
    script = (DATA / "hotel" / "demo.json").read_text()
    result = kad.simulate(hotel, script)
    assert result["precision"] == 1.0
    assert result["recall"] == 1.0
    assert result["kb"].startswith("#kadkb v1\n")


def test_bad_config_is_reported():
    with pytest.raises(kad.KadError, match="has-pool"):
        kad.load_config(
            "rule r\n  var X: entity(name)\n  pattern: * X\n  fact: (X, has-pool, \"yes\")\nend\n",
            "relation is-a\n  kind: type\n  qf: Is {E1} a {E2}?\n  qv: Is {E1} a {E2}?\n",
        )
