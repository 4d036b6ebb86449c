"""Bounded model enumeration, countermodel search and distinguishing formulas.

Two routes over the same bounded model space:

* :func:`enumerate_models` lists every valid model literally (states
  ``s1..sk``, edge labels over the whole ability pool, every valuation).
  It is the reference and is only practical for small bounds.
* :func:`find_countermodel` scans a quotient of that space.  Edge labels
  that pass exactly the same inclusion tests (``C(a) <= E``, the pooled and
  shared group abilities, and ``E == A``) are interchangeable for every
  formula being checked, so one representative label per class suffices.
  Edge configurations are further reduced modulo renaming of states, and
  all valuations of one configuration are checked at once, one bit per
  valuation.

Every witness is re-checked with :mod:`simlogic.semantics` before it is
returned.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from . import semantics
from .models import PointedModel, SimilarityModel, validate
from .syntax import (And, Atom, Bottom, Common, Distributed, Field, Formula,
                     Fragment, Iff, Implies, Know, Meta, Mutual, Neg, Or, Top,
                     agents_of, all_groups, atoms_of, enumerate_formulas,
                     fragment_of, modal_depth, render)


class SearchError(ValueError):
    """Bounds that are inconsistent, too large, or do not cover the formula."""


@dataclass(frozen=True)
class SearchBounds:
    max_states: int = 4
    ability_pool: tuple = ("x", "y", "z")
    agent_capabilities: Mapping = field(
        default_factory=lambda: {"a": frozenset({"x", "y"}), "b": frozenset({"x", "z"})},
        hash=False)
    atom_pool: tuple = ("p", "q")
    max_depth: int = 2
    vary_capabilities: bool = False
    max_models: int = 50_000_000

    def __post_init__(self):
        if self.max_states < 1:
            raise SearchError("max_states must be at least 1")
        if len(set(self.ability_pool)) != len(self.ability_pool):
            raise SearchError("ability pool has duplicates")
        caps = {a: frozenset(c) for a, c in self.agent_capabilities.items()}
        object.__setattr__(self, "agent_capabilities", caps)
        object.__setattr__(self, "ability_pool", tuple(sorted(self.ability_pool)))
        object.__setattr__(self, "atom_pool", tuple(self.atom_pool))
        for a, c in caps.items():
            if not c <= set(self.ability_pool):
                raise SearchError(f"C({a}) is not a subset of the ability pool")

    @property
    def agents(self) -> tuple:
        return tuple(sorted(self.agent_capabilities))

    def capability_maps(self) -> Iterator[dict]:
        if not self.vary_capabilities:
            yield dict(self.agent_capabilities)
            return
        subsets = _subsets(self.ability_pool)
        for choice in itertools.product(subsets, repeat=len(self.agents)):
            yield dict(zip(self.agents, choice))


DEFAULT_BOUNDS = SearchBounds()


@dataclass(frozen=True)
class NoCounterexample:
    """Nothing within the bounds falsifies (or separates)."""

    checked: int = 0  # edge configurations examined after reduction
    found = False

    def __str__(self) -> str:
        return "no counterexample within bounds"


@dataclass(frozen=True)
class Witness:
    model: SimilarityModel
    state: str
    formula: Formula
    other: PointedModel | None = None  # set by distinguish
    found = True

    @property
    def pointed(self) -> PointedModel:
        return PointedModel(self.model, self.state)

    def __str__(self) -> str:
        if self.other is None:
            return f"{render(self.formula)} is false at {self.state}"
        return (f"{render(self.formula)} holds at exactly one of "
                f"{self.state} and {self.other.point}")


SearchOutcome = NoCounterexample | Witness


def _subsets(pool: Sequence[str]) -> list[frozenset]:
    """All subsets of ``pool`` in binary-counter order (bit i = pool[i])."""
    return [frozenset(x for i, x in enumerate(pool) if mask >> i & 1)
            for mask in range(1 << len(pool))]


def _pairs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i, n)]


def _state_names(n: int) -> list[str]:
    return [f"s{i + 1}" for i in range(n)]


# ------------------------------------------------------- literal enumeration

def count_models(b: SearchBounds) -> int:
    k = len(b.ability_pool)
    total = 0
    for n in range(1, b.max_states + 1):
        off = n * (n - 1) // 2
        total += (2 ** k) ** n * (2 ** k - 1) ** off * 2 ** (n * len(b.atom_pool))
    caps = (2 ** k) ** len(b.agents) if b.vary_capabilities else 1
    return total * caps


def enumerate_models(b: SearchBounds) -> Iterator[SimilarityModel]:
    """Every valid model within the bounds, each exactly once, in a fixed order.

    The ability set of every model is the whole pool.  Order: capability map,
    number of states, edge labels (pairs ``(s1,s1), (s1,s2), ...``, labels in
    binary-counter order), then valuations.
    """
    total = count_models(b)
    if total > b.max_models:
        raise SearchError(f"bounds describe {total} models, above the limit of {b.max_models}")
    pool = b.ability_pool
    labels = _subsets(pool)
    full = frozenset(pool)
    val_choices = _subsets(b.atom_pool)
    for caps in b.capability_maps():
        for n in range(1, b.max_states + 1):
            names = _state_names(n)
            pairs = _pairs(n)
            options = [labels if i == j else [x for x in labels if x != full] for i, j in pairs]
            for edge_choice in itertools.product(*options):
                edges = {(names[i], names[j]): lab for (i, j), lab in zip(pairs, edge_choice)}
                for vals in itertools.product(val_choices, repeat=n):
                    m = SimilarityModel.create(names, pool, edges, caps, dict(zip(names, vals)))
                    if not validate(m):
                        yield m


# ------------------------------------------------------ compiled formulas

class _Program:
    """Formulas flattened into a DAG of integer-indexed instructions."""

    def __init__(self, formulas: Sequence[Formula], caps: Mapping[str, frozenset],
                 atom_pool: Sequence[str]):
        self.caps = caps
        self.atom_index = {p: j for j, p in enumerate(atom_pool)}
        self.tests: list[frozenset] = []
        self.test_index: dict[frozenset, int] = {}
        self.code: list[tuple] = []
        self.node_index: dict[Formula, int] = {}
        self.roots = [self._compile(f) for f in formulas]

    def _test(self, abilities: frozenset) -> int:
        if abilities not in self.test_index:
            self.test_index[abilities] = len(self.tests)
            self.tests.append(abilities)
        return self.test_index[abilities]

    def _emit(self, key, instr) -> int:
        if key in self.node_index:
            return self.node_index[key]
        self.code.append(instr)
        self.node_index[key] = len(self.code) - 1
        return len(self.code) - 1

    def _group_caps(self, group) -> list[frozenset]:
        missing = sorted(a for a in group if a not in self.caps)
        if missing:
            raise SearchError(f"agents {missing} have no capability in the bounds")
        return [self.caps[a] for a in sorted(group)]

    def _compile(self, f: Formula) -> int:
        if f in self.node_index:
            return self.node_index[f]
        if isinstance(f, Atom):
            if f.name not in self.atom_index:
                raise SearchError(f"atom {f.name!r} is not in the atom pool")
            return self._emit(f, ("atom", self.atom_index[f.name]))
        if isinstance(f, Top):
            return self._emit(f, ("top",))
        if isinstance(f, Bottom):
            return self._emit(f, ("bot",))
        if isinstance(f, Meta):
            raise SearchError(f"uninstantiated metavariable ${f.name}")
        if isinstance(f, Neg):
            return self._emit(f, ("neg", self._compile(f.child)))
        if isinstance(f, (Implies, And, Or, Iff)):
            op = {Implies: "imp", And: "and", Or: "or", Iff: "iff"}[type(f)]
            return self._emit(f, (op, self._compile(f.left), self._compile(f.right)))
        if isinstance(f, Know):
            (c,) = self._group_caps({f.agent})
            return self._emit(f, ("box", self._test(c), self._compile(f.child)))
        if isinstance(f, Distributed):
            c = frozenset().union(*self._group_caps(f.group))
            return self._emit(f, ("box", self._test(c), self._compile(f.child)))
        if isinstance(f, Field):
            c = frozenset.intersection(*self._group_caps(f.group))
            return self._emit(f, ("box", self._test(c), self._compile(f.child)))
        if isinstance(f, Mutual):
            child = self._compile(f.child)
            boxes = [self._emit(("box", self._test(c), child), ("box", self._test(c), child))
                     for c in self._group_caps(f.group)]
            return self._emit(f, ("all", tuple(boxes)))
        if isinstance(f, Common):
            tests = tuple(sorted(self._test(c) for c in self._group_caps(f.group)))
            return self._emit(f, ("common", tests, self._compile(f.child)))
        raise SearchError(f"cannot compile {type(f).__name__}")


@lru_cache(maxsize=None)
def _atom_masks(n: int, k: int) -> tuple:
    """``masks[i][j]``: bitmask over valuations where atom j holds at state i."""
    nbits = n * k
    size = 1 << nbits
    masks = []
    for i in range(n):
        row = []
        for j in range(k):
            bit = i * k + j
            block = (1 << (1 << bit)) - 1
            pattern = 0
            for start in range(1 << bit, size, 1 << (bit + 1)):
                pattern |= block << start
            row.append(pattern)
        masks.append(tuple(row))
    return tuple(masks)


@lru_cache(maxsize=64)
def _canonical_configs(n: int, k_diag: int, k_off: int) -> np.ndarray:
    """Edge configurations minimal under state renaming, as digit rows.

    A configuration gives one class index per pair in :func:`_pairs` order,
    radix ``k_diag`` on self-pairs and ``k_off`` elsewhere; the first pair is
    the most significant digit.  Rows come out in increasing code order.
    """
    pairs = _pairs(n)
    radix = np.array([k_diag if i == j else k_off for i, j in pairs], dtype=np.int64)
    total = int(np.prod(radix)) if len(radix) else 1
    if k_off == 0 and n > 1:
        return np.zeros((0, len(pairs)), dtype=np.int8)
    weights = np.ones(len(pairs), dtype=np.int64)
    for c in range(len(pairs) - 2, -1, -1):
        weights[c] = weights[c + 1] * radix[c + 1]
    codes = np.arange(total, dtype=np.int64)
    digits = np.empty((total, len(pairs)), dtype=np.int8)
    for c in range(len(pairs)):
        digits[:, c] = (codes // weights[c]) % radix[c]
    keep = np.ones(total, dtype=bool)
    index = {p: c for c, p in enumerate(pairs)}
    for perm in itertools.permutations(range(n)):
        if perm == tuple(range(n)):
            continue
        target = [index[tuple(sorted((perm[i], perm[j])))] for i, j in pairs]
        key = np.zeros(total, dtype=np.int64)
        for c in range(len(pairs)):
            key += digits[:, c].astype(np.int64) * weights[target[c]]
        keep &= key >= codes
    return digits[keep]


class _Scanner:
    """Evaluates a compiled program on every reduced model for one capability map."""

    def __init__(self, program: _Program, b: SearchBounds):
        self.p = program
        self.b = b
        pool = b.ability_pool
        full = frozenset(pool)
        classes: dict[tuple, frozenset] = {}
        for label in _subsets(pool):
            sig = tuple(t <= label for t in program.tests) + (label == full,)
            classes.setdefault(sig, label)
        self.diag = list(classes.items())
        self.off = [(sig, lab) for sig, lab in self.diag if not sig[-1]]

    def configs(self, n: int) -> np.ndarray:
        return _canonical_configs(n, len(self.diag), len(self.off))

    def run(self, n: int, row) -> list[tuple[int, int, int]]:
        """Values of the roots; returns ``(root, state, falsifying valuation)`` hits."""
        pairs = _pairs(n)
        k = len(self.b.atom_pool)
        full_mask = (1 << (1 << (n * k))) - 1
        atom_masks = _atom_masks(n, k)
        ntests = len(self.p.tests)
        # succ[t][s]: states reachable from s under test t
        succ = [[[] for _ in range(n)] for _ in range(ntests)]
        for (i, j), cls in zip(pairs, row):
            sig = (self.diag if i == j else self.off)[cls][0]
            for t in range(ntests):
                if sig[t]:
                    succ[t][i].append(j)
                    if i != j:
                        succ[t][j].append(i)
        reach_cache: dict[tuple, list] = {}
        vals: list[list[int]] = []
        states = range(n)
        for instr in self.p.code:
            op = instr[0]
            if op == "atom":
                j = instr[1]
                v = [atom_masks[i][j] for i in states]
            elif op == "top":
                v = [full_mask] * n
            elif op == "bot":
                v = [0] * n
            elif op == "neg":
                a = vals[instr[1]]
                v = [full_mask ^ x for x in a]
            elif op == "imp":
                a, c = vals[instr[1]], vals[instr[2]]
                v = [(full_mask ^ x) | y for x, y in zip(a, c)]
            elif op == "and":
                a, c = vals[instr[1]], vals[instr[2]]
                v = [x & y for x, y in zip(a, c)]
            elif op == "or":
                a, c = vals[instr[1]], vals[instr[2]]
                v = [x | y for x, y in zip(a, c)]
            elif op == "iff":
                a, c = vals[instr[1]], vals[instr[2]]
                v = [full_mask ^ (x ^ y) for x, y in zip(a, c)]
            elif op == "box":
                child = vals[instr[2]]
                v = []
                for s in states:
                    acc = full_mask
                    for t in succ[instr[1]][s]:
                        acc &= child[t]
                    v.append(acc)
            elif op == "all":
                v = [full_mask] * n
                for idx in instr[1]:
                    v = [x & y for x, y in zip(v, vals[idx])]
            else:  # common
                tests = instr[1]
                reach = reach_cache.get(tests)
                if reach is None:
                    reach = []
                    for s in states:
                        seen: set[int] = set()
                        frontier = [t for x in tests for t in succ[x][s]]
                        while frontier:
                            u = frontier.pop()
                            if u not in seen:
                                seen.add(u)
                                frontier.extend(t for x in tests for t in succ[x][u])
                        reach.append(sorted(seen))
                    reach_cache[tests] = reach
                child = vals[instr[2]]
                v = []
                for s in states:
                    acc = full_mask
                    for t in reach[s]:
                        acc &= child[t]
                    v.append(acc)
            vals.append(v)
        hits = []
        for r, root in enumerate(self.p.roots):
            for s in states:
                bad = full_mask ^ vals[root][s]
                if bad:
                    hits.append((r, s, (bad & -bad).bit_length() - 1))
                    break
        return hits

    def model(self, n: int, row, valuation_index: int) -> SimilarityModel:
        names = _state_names(n)
        k = len(self.b.atom_pool)
        edges = {}
        for (i, j), cls in zip(_pairs(n), row):
            lab = (self.diag if i == j else self.off)[cls][1]
            edges[(names[i], names[j])] = lab
        valuation = {
            names[i]: [p for j, p in enumerate(self.b.atom_pool) if valuation_index >> (i * k + j) & 1]
            for i in range(n)
        }
        return SimilarityModel.create(names, self.b.ability_pool, edges, self.p.caps, valuation)


def _check_coverage(formulas: Iterable[Formula], b: SearchBounds) -> None:
    for f in formulas:
        missing_atoms = atoms_of(f) - set(b.atom_pool)
        if missing_atoms:
            raise SearchError(f"atoms {sorted(missing_atoms)} are not in the atom pool")
        missing_agents = agents_of(f) - set(b.agent_capabilities)
        if missing_agents:
            raise SearchError(f"agents {sorted(missing_agents)} have no capability in the bounds")


def find_countermodels(formulas: Sequence[Formula], b: SearchBounds = DEFAULT_BOUNDS,
                       stop_at_first: bool = False) -> list[SearchOutcome]:
    """First falsifying pointed model for each formula, sharing one scan.

    Witness order: capability map, number of states, reduced edge
    configuration, then state and lowest valuation index.
    """
    formulas = list(formulas)
    _check_coverage(formulas, b)
    results: list[SearchOutcome | None] = [None] * len(formulas)
    checked = 0
    for caps in b.capability_maps():
        pending = [i for i, r in enumerate(results) if r is None]
        if not pending:
            break
        program = _Program([formulas[i] for i in pending], caps, b.atom_pool)
        scanner = _Scanner(program, b)
        for n in range(1, b.max_states + 1):
            configs = scanner.configs(n)
            if len(configs) > b.max_models:
                raise SearchError(f"{len(configs)} edge configurations exceed the limit")
            for row in configs:
                checked += 1
                hits = scanner.run(n, row)
                for r, s, v in hits:
                    i = pending[r]
                    if results[i] is not None:
                        continue
                    m = scanner.model(n, row, v)
                    state = m.states[s]
                    if semantics.satisfies(m, state, formulas[i]):
                        raise AssertionError(
                            f"bit-parallel scan and semantics disagree on {render(formulas[i])}")
                    results[i] = Witness(m, state, formulas[i])
                if stop_at_first and any(r is not None for r in results):
                    break
                if all(r is not None for r in results):
                    break
            if all(r is not None for r in results) or (stop_at_first and any(results)):
                break
        if stop_at_first and any(results):
            break
    return [r if r is not None else NoCounterexample(checked) for r in results]


def find_countermodel(f: Formula, b: SearchBounds = DEFAULT_BOUNDS) -> SearchOutcome:
    """A pointed model within the bounds where ``f`` is false, if any."""
    return find_countermodels([f], b)[0]


# --------------------------------------------------------------- schemes

def metavariables(f: Formula) -> list[str]:
    out: list[str] = []

    def walk(g):
        if isinstance(g, Meta):
            if g.name not in out:
                out.append(g.name)
        for attr in ("child", "left", "right"):
            if hasattr(g, attr):
                walk(getattr(g, attr))

    walk(f)
    return out


def substitute(f: Formula, binding: Mapping[str, Formula]) -> Formula:
    if isinstance(f, Meta):
        return binding[f.name]
    if isinstance(f, Neg):
        return Neg(substitute(f.child, binding))
    if isinstance(f, Know):
        return Know(f.agent, substitute(f.child, binding))
    if isinstance(f, (Mutual, Common, Distributed, Field)):
        return type(f)(f.group, substitute(f.child, binding))
    if isinstance(f, (Implies, And, Or, Iff)):
        return type(f)(substitute(f.left, binding), substitute(f.right, binding))
    return f


def scheme_instances(template: Formula, b: SearchBounds, instantiation_depth: int = 0,
                     max_size: int = 3) -> list[Formula]:
    """Instances with every metavariable drawn from the bounded formula enumeration."""
    names = metavariables(template)
    if not names:
        return [template]
    frag = fragment_of(template)
    domain = list(enumerate_formulas(b.agents, b.atom_pool, frag, instantiation_depth, max_size))
    return [substitute(template, dict(zip(names, choice)))
            for choice in itertools.product(domain, repeat=len(names))]


def check_scheme(template: Formula, b: SearchBounds = DEFAULT_BOUNDS,
                 instantiation_depth: int = 0, max_size: int = 3) -> SearchOutcome:
    """First falsified instance of a scheme, in instance order."""
    instances = scheme_instances(template, b, instantiation_depth, max_size)
    for outcome in find_countermodels(instances, b):
        if outcome.found:
            return outcome
    return NoCounterexample()


# ---------------------------------------------------------- distinguish

def distinguish(p1: PointedModel, p2: PointedModel, frag: Fragment, depth: int,
                atoms: Sequence[str]) -> SearchOutcome:
    """Smallest formula of ``frag`` with modal depth <= ``depth`` true at exactly one point.

    Formulas are generated by increasing size.  Each candidate is reduced to
    its joint extension over both models, and only the first formula per
    (extension, modal depth) is kept as a building block.  Since the
    operators are extensional this loses no distinguishing power, and the
    finite number of extensions makes the search terminate with a definite
    answer for the given depth.
    """
    m1, m2 = p1.model, p2.model
    if set(m1.capability) != set(m2.capability):
        raise SearchError("the two models have different agents")
    agents = sorted(m1.capability)
    groups = all_groups(agents)
    unary = [lambda x: Neg(x)]
    modal = [lambda x, a=a: Know(a, x) for a in agents]
    for enabled, cls in ((frag.uses_common, Common), (frag.uses_distributed, Distributed),
                         (frag.uses_field, Field)):
        if enabled:
            modal.extend(lambda x, g=g, cls=cls: cls(g, x) for g in groups)
    binary = [Implies, And, Or]
    memo1: dict = {}
    memo2: dict = {}

    def vector(f):
        return (semantics.extension(m1, f, memo1), semantics.extension(m2, f, memo2))

    best_depth: dict[tuple, int] = {}
    by_size: dict[int, list[tuple[Formula, int]]] = {}

    def consider(f, d, level):
        v = vector(f)
        if d >= best_depth.get(v, depth + 1):
            return None
        best_depth[v] = d
        level.append((f, d))
        if (p1.point in v[0]) != (p2.point in v[1]):
            return Witness(m1, p1.point, f, other=p2)
        return None

    def candidates(n):
        if n == 1:
            yield from ((Atom(a), 0) for a in atoms)
            yield Top(), 0
            yield Bottom(), 0
            return
        for f, d in by_size.get(n - 1, []):
            for op in unary:
                yield op(f), d
        for op in modal:
            for f, d in by_size.get(n - 1, []):
                if d < depth:
                    yield op(f), d + 1
        for op in binary:
            for i in range(1, n - 1):
                for f, d in by_size.get(i, []):
                    for g, e in by_size.get(n - 1 - i, []):
                        yield op(f, g), max(d, e)

    n = 0
    while True:
        n += 1
        level: list[tuple[Formula, int]] = []
        for f, d in candidates(n):
            hit = consider(f, d, level)
            if hit is not None:
                return hit
        by_size[n] = level
        if not level and _closed(by_size, best_depth, vector, unary, modal, binary, depth):
            return NoCounterexample()


def _closed(by_size, best_depth, vector, unary, modal, binary, depth) -> bool:
    """True when no operator applied to known building blocks yields anything new."""
    known = [fd for level in by_size.values() for fd in level]
    for f, d in known:
        for op in unary:
            if d < best_depth.get(vector(op(f)), depth + 1):
                return False
        if d < depth:
            for op in modal:
                if d + 1 < best_depth.get(vector(op(f)), depth + 1):
                    return False
    for f, d in known:
        for g, e in known:
            for op in binary:
                if max(d, e) < best_depth.get(vector(op(f, g)), depth + 1):
                    return False
    return True
