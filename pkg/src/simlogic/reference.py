"""Reference suites: the worked examples, the valid and invalid schemes, and
the expressivity fixtures, bundled so that the CLI can replay them in one go.

Every check returns a :class:`CheckResult`; nothing here raises on a
mismatch.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

from . import semantics
from .models import PointedModel, corpus_model
from .search import DEFAULT_BOUNDS, SearchBounds, distinguish, find_countermodels
from .syntax import (Atom, Common, Distributed, Field, Formula, Fragment, Iff, Implies, Know,
                     Mutual, Neg, And, conjunction, parse)


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0


# Truth facts at a pointed model: (model, state, formula).
EXAMPLE1_FACTS = (
    ("example1", "s1", "K a (p & ~q) & ~(K a r | K a ~r)"),
    # Bob's ignorance about q: the operator in the second conjunct is K b.
    ("example1", "s1", "K b (p & r) & ~(K b q | K b ~q)"),
    ("example1", "s1", "D {a,b} (p & ~q & r)"),
    ("example1", "s1", "F {a,b} p & ~(F {a,b} q | F {a,b} ~q) & ~(F {a,b} r | F {a,b} ~r)"),
)

EXAMPLE2_FACTS = (
    ("example2", "s2", "C {a,b} p & E {a,b} p & D {a,b} p & ~F {a,b} p"),
    ("example2", "s2", "F {a,b} q & E {a,b} q & D {a,b} q & ~C {a,b} q"),
    ("example2", "s3", "D {a,b} r & ~K a r & ~K b r & ~E {a,b} r"),
)

EXAMPLE2_REACHABLE = ("example2", "s2", frozenset({"a", "b"}), frozenset({"s2", "s3", "s4"}))

AB = frozenset({"a", "b"})

# Schemes with a falsifying model, instantiated at phi = p, G = {a,b}, a in G.
INVALID_SCHEMES = (
    ("C_G phi -> F_G phi", Implies(Common(AB, Atom("p")), Field(AB, Atom("p")))),
    ("E_G phi -> F_G phi", Implies(Mutual(AB, Atom("p")), Field(AB, Atom("p")))),
    ("D_G phi -> F_G phi", Implies(Distributed(AB, Atom("p")), Field(AB, Atom("p")))),
    ("F_G phi -> C_G phi", Implies(Field(AB, Atom("p")), Common(AB, Atom("p")))),
    ("E_G phi -> C_G phi", Implies(Mutual(AB, Atom("p")), Common(AB, Atom("p")))),
    ("D_G phi -> C_G phi", Implies(Distributed(AB, Atom("p")), Common(AB, Atom("p")))),
    ("D_G phi -> E_G phi", Implies(Distributed(AB, Atom("p")), Mutual(AB, Atom("p")))),
    ("D_G phi -> K_a phi", Implies(Distributed(AB, Atom("p")), Know("a", Atom("p")))),
)

INSTANCE_FORMULAS = (Atom("p"), Atom("q"), Implies(Atom("p"), Atom("q")))
INSTANCE_GROUPS = (frozenset({"a"}), frozenset({"b"}), AB)
INSTANCE_AGENTS = ("a", "b")


def valid_scheme_instances() -> dict[str, list[Formula]]:
    """Instances of the nine standard validities plus ``C_G phi -> D_G phi``.

    ``phi, psi`` range over ``p, q, p -> q``; groups over ``{a}, {b}, {a,b}``
    subject to each scheme's inclusion condition.
    """
    phis, groups, agents = INSTANCE_FORMULAS, INSTANCE_GROUPS, INSTANCE_AGENTS
    out: dict[str, list[Formula]] = {
        "K": [Implies(Know(a, Implies(f, g)), Implies(Know(a, f), Know(a, g)))
              for a in agents for f in phis for g in phis],
        "B": [Implies(f, Know(a, Neg(Know(a, Neg(f))))) for a in agents for f in phis],
        "C1": [Implies(Common(g, f), conjunction([Know(a, And(f, Common(g, f))) for a in sorted(g)]))
               for g in groups for f in phis],
        "D1": [Iff(Distributed(frozenset({a}), f), Know(a, f)) for a in agents for f in phis],
        "D2": [Implies(Distributed(g, f), Distributed(h, f))
               for g, h in itertools.product(groups, groups) if g <= h for f in phis],
        "BD": [Implies(f, Distributed(g, Neg(Distributed(g, Neg(f))))) for g in groups for f in phis],
        "F1": [Iff(Field(frozenset({a}), f), Know(a, f)) for a in agents for f in phis],
        "F2": [Implies(Field(g, f), Field(h, f))
               for g, h in itertools.product(groups, groups) if h <= g for f in phis],
        "BF": [Implies(f, Field(g, Neg(Field(g, Neg(f))))) for g in groups for f in phis],
        "C->D": [Implies(Common(g, f), Distributed(g, f)) for g in groups for f in phis],
    }
    return out


# Separation fixtures: (name, left, right, fragment with a witness, fragment without, operator).
EXPRESSIVITY_FIXTURES = (
    ("pair 2", ("appendix-exp2-2-M", "u1"), ("appendix-exp2-2-M_prime", "u_prime"),
     "ELD", "ELCF", Distributed),
    ("pair 3", ("appendix-exp2-3-M", "u1"), ("appendix-exp2-3-M_prime", "u_prime"),
     "ELF", "ELCD", Field),
)


def _timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


def check_examples() -> list[CheckResult]:
    results = []
    for suite, facts in (("example 1", EXAMPLE1_FACTS), ("example 2", EXAMPLE2_FACTS)):
        for model, state, text in facts:
            ok, dt = _timed(lambda: semantics.satisfies(corpus_model(model), state, parse(text)))
            results.append(CheckResult(suite, f"{state} |= {text}", ok, "" if ok else "false", dt))
    model, state, group, expected = EXAMPLE2_REACHABLE
    got, dt = _timed(lambda: semantics.reachable(corpus_model(model), state, group))
    results.append(CheckResult("example 2", f"reachable from {state} for {{a,b}}", got == expected,
                               ", ".join(sorted(got)), dt))
    return results


def check_invalid(b: SearchBounds = DEFAULT_BOUNDS) -> list[CheckResult]:
    formulas = [f for _, f in INVALID_SCHEMES]
    outcomes, dt = _timed(lambda: find_countermodels(formulas, b))
    results = []
    for (name, f), o in zip(INVALID_SCHEMES, outcomes):
        ok = o.found and not semantics.satisfies(o.model, o.state, f)
        detail = f"witness with {len(o.model.states)} states at {o.state}" if o.found else str(o)
        results.append(CheckResult("not valid", name, ok, detail, dt / len(formulas)))
    return results


def check_valid(b: SearchBounds = DEFAULT_BOUNDS) -> list[CheckResult]:
    results = []
    for name, instances in valid_scheme_instances().items():
        outcomes, dt = _timed(lambda: find_countermodels(instances, b))
        bad = [o for o in outcomes if o.found]
        detail = f"{len(instances)} instances" if not bad else str(bad[0])
        results.append(CheckResult("valid", name, not bad, detail, dt))
    return results


def check_expressivity(depth: int = 2) -> list[CheckResult]:
    results = []
    for name, (m1, s1), (m2, s2), yes, no, op in EXPRESSIVITY_FIXTURES:
        p1 = PointedModel(corpus_model(m1), s1)
        p2 = PointedModel(corpus_model(m2), s2)
        atoms = sorted(_atoms(p1) | _atoms(p2)) or ["p"]
        hit, dt = _timed(lambda: distinguish(p1, p2, Fragment.from_name(yes), 1, atoms))
        ok = hit.found and isinstance(hit.formula, op)
        detail = str(hit) if hit.found else "no witness"
        results.append(CheckResult("expressivity", f"{name}: {yes} separates at depth 1", ok,
                                   detail, dt))
        miss, dt = _timed(lambda: distinguish(p1, p2, Fragment.from_name(no), depth, atoms))
        results.append(CheckResult("expressivity",
                                   f"{name}: {no} does not separate at depth {depth}",
                                   not miss.found, str(miss), dt))
    return results


def _atoms(p: PointedModel) -> set[str]:
    return {x for s in p.model.states for x in p.model.props(s)}


def run_all(b: SearchBounds = DEFAULT_BOUNDS) -> list[CheckResult]:
    return check_examples() + check_invalid(b) + check_valid(b) + check_expressivity()
