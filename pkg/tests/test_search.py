import pytest

from simlogic import semantics
from simlogic.models import PointedModel, corpus_model, validate
from simlogic.search import (DEFAULT_BOUNDS, NoCounterexample, SearchBounds, SearchError,
                             Witness, check_scheme, count_models, distinguish, enumerate_models,
                             find_countermodel, find_countermodels, metavariables,
                             scheme_instances, substitute)
from simlogic.syntax import (Atom, Bottom, Distributed, Field, Fragment, Meta, fragment_of,
                             modal_depth, parse)

ONE_X = SearchBounds(max_states=1, ability_pool=("x",), agent_capabilities={"a": {"x"}},
                     atom_pool=("p",))
NOTHING = SearchBounds(max_states=1, ability_pool=(), agent_capabilities={"a": set()},
                       atom_pool=())
TINY = SearchBounds(max_states=3, ability_pool=("x", "y"),
                    agent_capabilities={"a": {"x"}, "b": {"x", "y"}}, atom_pool=("p",))
TINY_VARY = SearchBounds(max_states=2, ability_pool=("x", "y"),
                         agent_capabilities={"a": set(), "b": set()}, atom_pool=("p",),
                         vary_capabilities=True)


# --- literal enumeration ---------------------------------------------------------

def test_enumeration_counts():
    assert len(list(enumerate_models(ONE_X))) == count_models(ONE_X) == 4
    assert len(list(enumerate_models(NOTHING))) == count_models(NOTHING) == 1


def test_enumeration_is_valid_distinct_and_deterministic():
    b = SearchBounds(max_states=2, ability_pool=("x", "y"),
                     agent_capabilities={"a": {"x"}}, atom_pool=("p",))
    first = list(enumerate_models(b))
    assert first == list(enumerate_models(b))
    assert all(validate(m) == [] for m in first)
    keys = {(m.states, tuple(sorted(m.edges.items())), tuple(sorted(
        (s, m.props(s)) for s in m.states))) for m in first}
    assert len(keys) == len(first) == count_models(b)


def test_enumeration_limit():
    b = SearchBounds(max_states=3, max_models=10)
    with pytest.raises(SearchError):
        next(enumerate_models(b))


def test_default_bounds():
    b = DEFAULT_BOUNDS
    assert (b.max_states, len(b.ability_pool), b.agents, b.atom_pool, b.max_depth) \
        == (4, 3, ("a", "b"), ("p", "q"), 2)


def test_bad_bounds():
    with pytest.raises(SearchError):
        SearchBounds(max_states=0)
    with pytest.raises(SearchError):
        SearchBounds(ability_pool=("x",), agent_capabilities={"a": {"y"}})


# --- countermodels ---------------------------------------------------------------

@pytest.mark.parametrize("text", [
    "C {a,b} p -> F {a,b} p",
    "D {a,b} p -> K a p",
    "K a p -> p",
    "D {a,b} p -> D {a} p",
])
def test_witnesses_found_and_reverified(text):
    f = parse(text)
    out = find_countermodel(f)
    assert isinstance(out, Witness) and out.found
    assert validate(out.model) == []
    assert not semantics.satisfies(out.model, out.state, f)
    assert out.formula == f


@pytest.mark.parametrize("text", [
    "D {a} p <-> K a p",
    "C {a,b} p -> D {a,b} p",
    "K a (p -> q) -> K a p -> K a q",
])
def test_no_counterexample(text):
    out = find_countermodel(parse(text))
    assert isinstance(out, NoCounterexample) and not out.found
    assert out.checked > 0


def test_search_is_deterministic():
    f = parse("E {a,b} p -> C {a,b} p")
    a, b = find_countermodel(f), find_countermodel(f)
    assert (a.model, a.state) == (b.model, b.state)


def test_batch_agrees_with_single_searches():
    fs = [parse(t) for t in ("K a p -> p", "p -> p", "F {a,b} p -> C {a,b} p")]
    batch = find_countermodels(fs)
    for f, out in zip(fs, batch):
        single = find_countermodel(f)
        assert out.found == single.found
        if out.found:
            assert (out.model, out.state) == (single.model, single.state)


def test_coverage_errors():
    with pytest.raises(SearchError, match="atom"):
        find_countermodel(parse("K a r"))
    with pytest.raises(SearchError, match="agent"):
        find_countermodel(parse("K c p"))


CROSS_CHECK = [parse(t) for t in (
    "K a p -> p",
    "K b p -> K a p",
    "K a p -> K b p",
    "D {a,b} p -> K b p",
    "F {a,b} p -> K b p",
    "K b p -> F {a,b} p",
    "E {a,b} p -> C {a,b} p",
    "C {a,b} p -> D {a,b} p",
    "C {a} p -> K a K a p",
    "p -> K a ~K a ~p",
    "K a K a p -> K a p",
    "~K b false",
    "C {a,b} ~p | D {a,b} p",
    "F {a,b} K b p -> K a p",
    "p -> D {a,b} ~D {a,b} ~p",
    "K a (p -> F {a,b} p)",
)]


def _literal_falsified(fs, b):
    bad = [False] * len(fs)
    for m in enumerate_models(b):
        memo: dict = {}
        for i, f in enumerate(fs):
            if not bad[i] and semantics.extension(m, f, memo) != frozenset(m.states):
                bad[i] = True
    return bad


@pytest.mark.parametrize("bounds", [TINY, TINY_VARY], ids=["fixed", "varying"])
def test_reduced_scan_matches_literal_enumeration(bounds):
    literal = _literal_falsified(CROSS_CHECK, bounds)
    scanned = [o.found for o in find_countermodels(CROSS_CHECK, bounds)]
    assert scanned == literal
    assert any(literal) and not all(literal)


def test_varying_capabilities_finds_more():
    f = parse("K a p -> K b p")
    assert find_countermodel(f, TINY_VARY).found
    same = SearchBounds(max_states=2, ability_pool=("x",), agent_capabilities={"a": {"x"},
                        "b": {"x"}}, atom_pool=("p",))
    assert not find_countermodel(f, same).found


# --- schemes ---------------------------------------------------------------------

def test_metavariables_and_substitution():
    f = parse("$phi -> K a ($psi & $phi)")
    assert metavariables(f) == ["phi", "psi"]
    g = substitute(f, {"phi": Atom("p"), "psi": Bottom()})
    assert g == parse("p -> K a (false & p)")


def test_scheme_instances_cover_the_domain():
    inst = scheme_instances(parse("$phi -> $phi"), DEFAULT_BOUNDS, 0, 1)
    assert inst == [parse("p -> p"), parse("q -> q")]
    assert all(not any(isinstance(x, Meta) for x in [g]) for g in inst)


@pytest.mark.parametrize("text", [
    "K a ($phi -> $psi) -> K a $phi -> K a $psi",
    "$phi -> F {a,b} ~F {a,b} ~$phi",
])
def test_valid_schemes(text):
    assert not check_scheme(parse(text)).found


def test_invalid_scheme_reports_instance():
    out = check_scheme(parse("D {a,b} $phi -> D {a} $phi"))
    assert out.found
    assert not semantics.satisfies(out.model, out.state, out.formula)
    assert fragment_of(out.formula).name == "ELD"


# --- distinguishing formulas -------------------------------------------------------

def pointed(name, state):
    return PointedModel(corpus_model(name), state)


PAIR2 = (pointed("appendix-exp2-2-M", "u1"), pointed("appendix-exp2-2-M_prime", "u_prime"))
PAIR3 = (pointed("appendix-exp2-3-M", "u1"), pointed("appendix-exp2-3-M_prime", "u_prime"))


def _separates(out, p1, p2):
    a = semantics.satisfies(p1.model, p1.point, out.formula)
    b = semantics.satisfies(p2.model, p2.point, out.formula)
    return a != b


def test_pair2_distributed_witness():
    out = distinguish(*PAIR2, Fragment.from_name("ELD"), 1, ["p"])
    assert out.found and out.formula == Distributed(frozenset("ab"), Bottom())
    assert _separates(out, *PAIR2)


def test_pair2_not_separated_without_distributed():
    assert not distinguish(*PAIR2, Fragment.from_name("ELCF"), 2, ["p"]).found


def test_pair3_field_witness():
    out = distinguish(*PAIR3, Fragment.from_name("ELF"), 1, ["p"])
    assert out.found and out.formula == Field(frozenset("ab"), Atom("p"))
    assert _separates(out, *PAIR3)


def test_pair3_not_separated_without_field():
    assert not distinguish(*PAIR3, Fragment.from_name("ELCD"), 2, ["p"]).found


def test_distinguish_respects_fragment_and_depth():
    e1, e2 = corpus_model("example1"), corpus_model("example2")
    p1, p2 = PointedModel(e1, "s1"), PointedModel(e1, "s2")
    out = distinguish(p1, p2, Fragment.from_name("EL"), 0, ["p", "q", "r"])
    assert out.found and modal_depth(out.formula) == 0 and _separates(out, p1, p2)
    q1, q2 = PointedModel(e2, "s2"), PointedModel(e2, "s3")
    out = distinguish(q1, q2, Fragment.from_name("ELC"), 2, ["p", "q", "r"])
    assert out.found and fragment_of(out.formula) <= Fragment.from_name("ELC")


def test_identical_points_are_never_separated():
    p1 = pointed("example2", "s2")
    assert not distinguish(p1, p1, Fragment.from_name("ELCDF"), 2, ["p", "q", "r"]).found


def test_distinguish_rejects_mismatched_agents():
    from simlogic.models import SimilarityModel
    other = SimilarityModel.create(["s"], ["x"], {}, {"c": ["x"]}, {})
    with pytest.raises(SearchError):
        distinguish(PAIR2[0], PointedModel(other, "s"), Fragment.from_name("EL"), 1, ["p"])
