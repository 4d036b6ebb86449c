"""Truth of formulas in similarity models.

Evaluation works on extensions: each subformula is mapped once to the set of
states where it holds, memoized per call.

Common knowledge is evaluated as truth at every state reachable in one or
more steps, where ``u -> v`` is a step for group ``G`` when some ``a`` in
``G`` has ``C(a) <= E(u, v)``.  :func:`e_unfold` evaluates ``E_G^n`` by
literal nesting and serves as the cross-check.

Field knowledge with an empty shared capability quantifies over every state,
since the empty set is included in every edge label.
"""

from __future__ import annotations

from .models import KripkeModel, SimilarityModel
from .syntax import (And, Atom, Bottom, Common, Distributed, Field, Formula,
                     Iff, Implies, Know, Meta, Mutual, Neg, Or, Top, render)


class EvaluationError(ValueError):
    """Unknown state, agent or operator during evaluation."""


def _check_group(m: SimilarityModel, group) -> None:
    if not group:
        raise EvaluationError("empty group")
    missing = sorted(a for a in group if a not in m.capability)
    if missing:
        raise EvaluationError(f"unknown agents {missing}")


def _box(m: SimilarityModel, required: frozenset, inner: frozenset) -> frozenset:
    """States all of whose ``required``-successors lie in ``inner``."""
    return frozenset(
        s for s in m.states
        if all(t in inner for t in m.states if required <= m.edge(s, t))
    )


def _step_sets(m: SimilarityModel, group) -> list[frozenset]:
    return [m.capability[a] for a in sorted(group)]


def reachable(m: SimilarityModel, s: str, group) -> frozenset:
    """States reachable from ``s`` in at least one G-step."""
    if s not in m.states:
        raise EvaluationError(f"unknown state {s!r}")
    _check_group(m, group)
    caps = _step_sets(m, group)

    def successors(u):
        return [v for v in m.states if any(c <= m.edge(u, v) for c in caps)]

    seen: set[str] = set()
    frontier = successors(s)
    while frontier:
        v = frontier.pop()
        if v not in seen:
            seen.add(v)
            frontier.extend(successors(v))
    return frozenset(seen)


def extension(m: SimilarityModel, f: Formula, memo: dict | None = None) -> frozenset:
    """The set of states of ``m`` where ``f`` holds."""
    if memo is None:
        memo = {}
    hit = memo.get(f)
    if hit is not None:
        return hit

    if isinstance(f, Atom):
        out = frozenset(s for s in m.states if f.name in m.props(s))
    elif isinstance(f, Top):
        out = frozenset(m.states)
    elif isinstance(f, Bottom):
        out = frozenset()
    elif isinstance(f, Neg):
        out = frozenset(m.states) - extension(m, f.child, memo)
    elif isinstance(f, Implies):
        out = (frozenset(m.states) - extension(m, f.left, memo)) | extension(m, f.right, memo)
    elif isinstance(f, And):
        out = extension(m, f.left, memo) & extension(m, f.right, memo)
    elif isinstance(f, Or):
        out = extension(m, f.left, memo) | extension(m, f.right, memo)
    elif isinstance(f, Iff):
        left, right = extension(m, f.left, memo), extension(m, f.right, memo)
        out = frozenset(s for s in m.states if (s in left) == (s in right))
    elif isinstance(f, Know):
        _check_group(m, {f.agent})
        out = _box(m, m.capability[f.agent], extension(m, f.child, memo))
    elif isinstance(f, Mutual):
        _check_group(m, f.group)
        inner = extension(m, f.child, memo)
        out = frozenset(m.states)
        for a in f.group:
            out &= _box(m, m.capability[a], inner)
    elif isinstance(f, Distributed):
        _check_group(m, f.group)
        pooled = frozenset().union(*(m.capability[a] for a in f.group))
        out = _box(m, pooled, extension(m, f.child, memo))
    elif isinstance(f, Field):
        _check_group(m, f.group)
        shared = frozenset.intersection(*(m.capability[a] for a in f.group))
        out = _box(m, shared, extension(m, f.child, memo))
    elif isinstance(f, Common):
        _check_group(m, f.group)
        inner = extension(m, f.child, memo)
        out = frozenset(s for s in m.states if reachable(m, s, f.group) <= inner)
    elif isinstance(f, Meta):
        raise EvaluationError(f"cannot evaluate metavariable ${f.name}")
    else:
        raise EvaluationError(f"unknown formula node {type(f).__name__}")
    memo[f] = out
    return out


def satisfies(m: SimilarityModel, s: str, f: Formula) -> bool:
    if s not in m.states:
        raise EvaluationError(f"unknown state {s!r}")
    return s in extension(m, f)


def valid_in(m: SimilarityModel, f: Formula) -> bool:
    return extension(m, f) == frozenset(m.states)


def e_unfold(m: SimilarityModel, s: str, group, f: Formula, n: int) -> bool:
    """Truth of ``E_G^n f`` at ``s``, by nesting the mutual-knowledge operator n times."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    g = f
    for _ in range(n):
        g = Mutual(frozenset(group), g)
    return satisfies(m, s, g)


def c_by_unfolding(m: SimilarityModel, s: str, group, f: Formula) -> bool:
    """``C_G f`` as the conjunction of ``E_G^n f`` for n = 1 .. |W|."""
    return all(e_unfold(m, s, group, f, n) for n in range(1, len(m.states) + 1))


# ---------------------------------------------------------- Kripke oracle

def kripke_extension(n: KripkeModel, f: Formula, memo: dict | None = None) -> frozenset:
    """Classical relational semantics; distributed knowledge uses the intersection of relations."""
    if memo is None:
        memo = {}
    if f in memo:
        return memo[f]
    W = frozenset(n.states)

    def rel(agents):
        agents = sorted(agents)
        missing = [a for a in agents if a not in n.relations]
        if missing:
            raise EvaluationError(f"unknown agents {missing}")
        return agents

    def box(pairs, inner):
        return frozenset(s for s in n.states if all(t in inner for (u, t) in pairs if u == s))

    if isinstance(f, Atom):
        out = n.valuation.get(f.name, frozenset()) & W
    elif isinstance(f, Top):
        out = W
    elif isinstance(f, Bottom):
        out = frozenset()
    elif isinstance(f, Neg):
        out = W - kripke_extension(n, f.child, memo)
    elif isinstance(f, Implies):
        out = (W - kripke_extension(n, f.left, memo)) | kripke_extension(n, f.right, memo)
    elif isinstance(f, And):
        out = kripke_extension(n, f.left, memo) & kripke_extension(n, f.right, memo)
    elif isinstance(f, Or):
        out = kripke_extension(n, f.left, memo) | kripke_extension(n, f.right, memo)
    elif isinstance(f, Iff):
        out = W - (kripke_extension(n, f.left, memo) ^ kripke_extension(n, f.right, memo))
    elif isinstance(f, Know):
        out = box(n.relations[rel([f.agent])[0]], kripke_extension(n, f.child, memo))
    elif isinstance(f, Mutual):
        union = frozenset().union(*(n.relations[a] for a in rel(f.group)))
        out = box(union, kripke_extension(n, f.child, memo))
    elif isinstance(f, Distributed):
        inter = frozenset.intersection(*(n.relations[a] for a in rel(f.group)))
        out = box(inter, kripke_extension(n, f.child, memo))
    elif isinstance(f, Common):
        union = set().union(*(n.relations[a] for a in rel(f.group)))
        closure = set(union)
        while True:
            extra = {(s, v) for (s, t) in closure for (u, v) in union if u == t} - closure
            if not extra:
                break
            closure |= extra
        out = box(closure, kripke_extension(n, f.child, memo))
    else:
        raise EvaluationError(f"{render(f)!r} has no relational reading")
    memo[f] = out
    return out
