import itertools

import pytest
from hypothesis import strategies as st

from simlogic.models import KripkeModel, SimilarityModel, corpus_model
from simlogic.syntax import (And, Atom, Bottom, Common, Distributed, Field, Iff, Implies, Know,
                             Mutual, Neg, Or, Top)

AGENTS = ("a", "b")
GROUPS = [frozenset(g) for g in ({"a"}, {"b"}, {"a", "b"})]

atoms = st.sampled_from([Atom("p"), Atom("q"), Atom("r"), Top(), Bottom()])
groups = st.sampled_from(GROUPS)


def _extend(children):
    return st.one_of(
        st.builds(Neg, children),
        st.builds(Implies, children, children),
        st.builds(And, children, children),
        st.builds(Or, children, children),
        st.builds(Iff, children, children),
        st.builds(Know, st.sampled_from(AGENTS), children),
        *(st.builds(cls, groups, children) for cls in (Mutual, Common, Distributed, Field)),
    )


formulas = st.recursive(atoms, _extend, max_leaves=12)


@st.composite
def similarity_models(draw, max_states=3, pool=("x", "y", "z")):
    """Small valid models with agents a and b."""
    n = draw(st.integers(1, max_states))
    states = [f"s{i + 1}" for i in range(n)]
    labels = st.frozensets(st.sampled_from(pool))
    edges = {}
    for i, j in itertools.combinations_with_replacement(range(n), 2):
        lab = draw(labels)
        if i != j and lab == frozenset(pool):
            lab = lab - {pool[0]}
        edges[(states[i], states[j])] = lab
    caps = {a: draw(labels) for a in AGENTS}
    val = {s: draw(st.frozensets(st.sampled_from(["p", "q"]))) for s in states}
    return SimilarityModel.create(states, pool, edges, caps, val)


@st.composite
def kripke_models(draw, max_states=4):
    n = draw(st.integers(1, max_states))
    states = [f"w{i}" for i in range(n)]
    pairs = list(itertools.combinations_with_replacement(states, 2))
    relations = {}
    for a in AGENTS:
        chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
        relations[a] = {(s, t) for s, t in chosen} | {(t, s) for s, t in chosen}
    val = {p: draw(st.frozensets(st.sampled_from(states))) for p in ("p", "q")}
    return KripkeModel.create(states, relations, val)


@pytest.fixture(scope="session")
def example1():
    return corpus_model("example1")


@pytest.fixture(scope="session")
def example2():
    return corpus_model("example2")
