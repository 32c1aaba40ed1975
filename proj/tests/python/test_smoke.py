import json
import pathlib
import shutil

import numpy as np
import pytest

import pglee

DEMO = pathlib.Path(__file__).resolve().parents[2] / "data" / "demo"
SENTENCE = ("The threat posed by the Iraqi dictator justifies a war, which is sure to kill "
            "thousands of innocent children and women.")
VERBS = ["war", "kill"]
NOUNS = ["threat", "posed", "justifies"]
GAZ = ["Iraqi dictator", "children", "women"]


def test_prompt_and_candidates():
    assert pglee.build_prompt(SENTENCE, VERBS, NOUNS, GAZ) == \
        "threat posed Iraqi dictator justifies war kill children women."
    events = pglee.generate_rule_based(SENTENCE, VERBS, NOUNS, GAZ)
    assert [e["trigger"] for e in events] == ["war", "kill"]
    assert events[1]["arguments"] == ["children", "women"]
    assert events[0]["trigger_span"] == (51, 54)


def test_grammar_round_trip():
    y = pglee.serialize_candidates([("war", ["Iraqi dictator"]), ("kill", ["children", "women"])])
    assert y == "Event war has arguments: Iraqi dictator; Event kill has arguments: children, women."
    events, skipped = pglee.parse_candidates(y + "\ngarbage")
    assert skipped == ["garbage"]
    assert [e["arguments"] for e in events] == [["Iraqi dictator"], ["children", "women"]]


def test_tokenize_offsets():
    toks = pglee.tokenize("Ozkan, rushed.")
    assert toks == [("Ozkan", 0, 5), (",", 5, 6), ("rushed", 7, 13), (".", 13, 14)]


def test_attention_sums_to_one():
    a = pglee.normalize_attention([1.0, -2.0, 3.5])
    assert sum(a) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(Exception):
        pglee.normalize_attention([])


def test_clustering():
    rng = np.random.default_rng(0)
    pts = np.vstack([rng.normal(c, 0.5, size=(30, 2)) for c in [(0, 0), (20, 0), (0, 20), (20, 20)]])
    model = pglee.minibatch_kmeans(pts, 4, iterations=20, batch=len(pts), seed=3)
    assert model["centroids"].shape == (4, 2)
    trace = model["inertia_trace"]
    assert all(b <= a * (1 + 1e-12) for a, b in zip(trace, trace[1:]))
    p = pglee.membership_prob(np.array([0.0, 5.0]), np.array([[-1.0, 0.0], [1.0, 0.0]]))
    assert p == [0.5, 0.5]
    assert pglee.silhouette(pts, model["assignments"]) > 0.8
    best_k, candidates = pglee.sweep_k(pts, 2, 6, seed=1)
    assert best_k == 4 and len(candidates) == 5


def test_cli_commands(tmp_path):
    out = tmp_path / "out"
    cfg = str(DEMO / "config.json")
    assert pglee.run("induce", cfg, [f"paths.output_dir={json.dumps(str(out))}", "train.epochs=3"]) == 0
    schemas = json.loads((out / "schemas.json").read_text())
    assert schemas and all("roles" in s for s in schemas)
    assert pglee.run("induce", str(tmp_path / "missing.json")) == 2
