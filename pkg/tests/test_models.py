import json

import pytest
from hypothesis import given, settings

from conftest import kripke_models, similarity_models
from simlogic import models
from simlogic.models import (KripkeModel, ModelError, PointedModel, SimilarityModel,
                             corpus_model, corpus_names, group_abilities, load, load_kripke,
                             save, save_kripke, to_document, translate_kripke, validate)


def doc(**overrides):
    base = {
        "format": 1,
        "states": ["s", "t"],
        "abilities": ["x", "y"],
        "agents": {"a": ["x"]},
        "edges": [{"pair": ["s", "t"], "labels": ["x"]}],
        "valuation": {"s": ["p"]},
    }
    base.update(overrides)
    return json.dumps(base)


# --- corpus ------------------------------------------------------------------

def test_corpus_contents():
    assert corpus_names() == ["appendix-exp2-2-M", "appendix-exp2-2-M_prime",
                              "appendix-exp2-3-M", "appendix-exp2-3-M_prime",
                              "example1", "example2"]
    for name in corpus_names():
        assert validate(corpus_model(name)) == []


def test_example1(example1):
    assert example1.edge("s1", "s2") == {"alpha", "gamma"}
    assert example1.edge("s1", "s3") == {"alpha", "beta"}
    assert example1.edge("s1", "s4") == {"alpha"}
    assert example1.edge("s3", "s3") == {"alpha", "beta", "gamma"}
    assert example1.capability == {"a": {"alpha", "beta"}, "b": {"alpha", "gamma"}}
    assert example1.props("s2") == {"p", "q", "r"}


def test_example2(example2):
    assert example2.edge("s2", "s3") == {"lambda", "pi"}
    assert example2.edge("s1", "s3") == frozenset()
    assert example2.edge("s4", "s4") == {"lambda", "pi"}


def test_appendix_shapes():
    m = corpus_model("appendix-exp2-2-M")
    assert all(m.edge(s, s) == frozenset() for s in m.states)
    labels = sorted(sorted(m.edge(s, t)) for s in m.states for t in m.states if s < t and m.edge(s, t))
    assert labels == [["1", "2"], ["1", "2"], ["1", "3"], ["1", "3"]]
    prime = corpus_model("appendix-exp2-2-M_prime")
    assert prime.edge("u_prime", "u_prime") == {"1", "2", "3"}
    m3 = corpus_model("appendix-exp2-3-M")
    assert m3.edge("u1", "u2") == {"1"}
    assert m3.edge("u1", "u1") == m3.edge("u2", "u2") == {"1", "2", "3"}


# --- validation ---------------------------------------------------------------

def test_positivity_violation():
    m = SimilarityModel.create(["s", "t"], ["x"], {("s", "t"): ["x"]}, {"a": ["x"]}, {})
    problems = validate(m)
    assert [v.kind for v in problems] == ["positivity"]
    assert problems[0].where == ("s", "t")


def test_full_self_edge_is_allowed():
    m = SimilarityModel.create(["s"], ["x"], {("s", "s"): ["x"]}, {"a": ["x"]}, {})
    assert validate(m) == []


def test_symmetry_violation_on_raw_storage():
    m = SimilarityModel(("s", "t"), frozenset({"x", "y"}), {("s", "t"): frozenset({"x"})},
                        {"a": frozenset({"x"})}, {})
    assert "symmetry" in [v.kind for v in validate(m)]


def test_reference_violation():
    m = SimilarityModel.create(["s"], ["x"], {}, {"a": ["z"]}, {})
    assert [v.kind for v in validate(m)] == ["reference"]


def test_empty_ability_set_forces_single_state():
    assert validate(SimilarityModel.create(["s"], [], {}, {"a": []}, {})) == []
    two = SimilarityModel.create(["s", "t"], [], {}, {"a": []}, {})
    assert [v.kind for v in validate(two)] == ["positivity"]


def test_pointed_model_checks_point(example1):
    PointedModel(example1, "s1")
    with pytest.raises(ModelError):
        PointedModel(example1, "nowhere")


# --- group abilities ---------------------------------------------------------

def test_group_abilities(example1, example2):
    assert group_abilities(example1, {"a", "b"}, "union") == {"alpha", "beta", "gamma"}
    assert group_abilities(example1, {"a", "b"}, "intersection") == {"alpha"}
    for mode in ("union", "intersection"):
        assert group_abilities(example2, {"a"}, mode) == {"lambda", "pi"}


@pytest.mark.parametrize("group", [set(), {"zed"}])
def test_group_abilities_errors(example1, group):
    with pytest.raises(ModelError):
        group_abilities(example1, group)


@given(similarity_models())
def test_singleton_group_abilities(m):
    for a in m.capability:
        assert group_abilities(m, {a}, "union") == group_abilities(m, {a}, "intersection") \
            == m.capability[a]


# --- serialization -----------------------------------------------------------

def test_unlisted_pair_has_empty_label():
    m = load(doc())
    assert m.edge("s", "s") == frozenset()
    assert m.edge("t", "s") == {"x"}


@pytest.mark.parametrize("bad, match", [
    (doc(states=["s", "s"]), "duplicate state"),
    (doc(edges=[{"pair": ["s", "u"], "labels": []}]), "unknown state"),
    (doc(edges=[{"pair": ["s", "t"], "labels": ["w"]}]), "unknown abilities"),
    (doc(agents={"a": ["w"]}), "unknown abilities"),
    (doc(valuation={"u": ["p"]}), "unknown state"),
    (doc(edges=[{"pair": ["s", "t"], "labels": ["x"]}, {"pair": ["t", "s"], "labels": ["y"]}]),
     "different labels"),
    (doc(edges=[{"pair": ["s", "t"], "labels": ["x", "y"]}]), "positivity"),
    (doc(format=2), "schema"),
    (doc(extra=1), "schema"),
    ("{not json", "JSON"),
])
def test_load_errors(bad, match):
    with pytest.raises(ModelError, match=match):
        load(bad)


def test_load_without_check_defers_to_validate():
    m = load(doc(edges=[{"pair": ["s", "t"], "labels": ["x", "y"]}]), check=False)
    assert [v.kind for v in validate(m)] == ["positivity"]


def test_both_orders_with_same_labels_is_fine():
    edges = [{"pair": ["s", "t"], "labels": ["x"]}, {"pair": ["t", "s"], "labels": ["x"]}]
    assert load(doc(edges=edges)).edge("s", "t") == {"x"}


def test_save_is_canonical(example1):
    data = save(example1)
    assert save(load(data)) == data
    parsed = json.loads(data)
    assert parsed["states"] == sorted(parsed["states"])
    assert list(parsed["agents"]) == sorted(parsed["agents"])
    pairs = [tuple(e["pair"]) for e in parsed["edges"]]
    assert pairs == sorted(pairs) and all(s <= t for s, t in pairs)


def test_bundled_files_are_canonical():
    for name in corpus_names():
        path = models.corpus_path(name)
        assert save(load(path.read_bytes())) == path.read_bytes()


@settings(max_examples=100)
@given(similarity_models())
def test_round_trip(m):
    back = load(save(m))
    assert back == m
    assert to_document(back) == to_document(m)


# --- Kripke models and the translation ---------------------------------------

def test_translate_single_state():
    n = KripkeModel.create(["s"], {"a": {("s", "s")}}, {"p": {"s"}})
    m = translate_kripke(n)
    assert m.abilities == {"a", "b_fresh"}
    assert m.edge("s", "s") == {"a"}
    assert m.capability == {"a": {"a"}}
    assert m.props("s") == {"p"}


def test_translate_two_states():
    n = KripkeModel.create(["s", "t"], {"a": {("s", "t"), ("t", "s")}}, {})
    m = translate_kripke(n)
    assert m.edge("s", "t") == {"a"}
    assert m.edge("s", "s") == m.edge("t", "t") == frozenset()


def test_translate_keeps_positivity_when_every_agent_relates():
    rel = {("s", "t"), ("t", "s")}
    m = translate_kripke(KripkeModel.create(["s", "t"], {"a": rel, "b": rel}, {}))
    assert m.edge("s", "t") == {"a", "b"} != m.abilities
    assert validate(m) == []


def test_fresh_ability_avoids_agent_names():
    n = KripkeModel.create(["s"], {"b_fresh": set()}, {})
    assert translate_kripke(n).abilities == {"b_fresh", "b_fresh1"}


def test_translate_rejects_asymmetric():
    n = KripkeModel.create(["s", "t"], {"a": {("s", "t")}}, {})
    with pytest.raises(ModelError, match="not symmetric"):
        translate_kripke(n)


@settings(max_examples=200)
@given(kripke_models(max_states=5))
def test_translation_always_valid(n):
    m = translate_kripke(n)
    assert validate(m) == []
    for s in n.states:
        for t in n.states:
            assert m.edge(s, t) == {a for a, r in n.relations.items() if (s, t) in r}


@given(kripke_models())
def test_kripke_round_trip(n):
    assert load_kripke(save_kripke(n)) == n
