"""Similarity models, symmetric Kripke models and the translation between them.

A similarity model is ``(W, A, E, C, nu)``: states, a finite ability set, an
edge function from state pairs to ability sets, a capability function from
agents to ability sets and a valuation.  Edges are stored under both ordered
keys; a pair that is absent has the empty label.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

import jsonschema

FORMAT_VERSION = 1


class ModelError(ValueError):
    """Malformed model data or a model that violates its invariants."""


@dataclass(frozen=True)
class Violation:
    kind: str  # "positivity" | "symmetry" | "reference"
    where: tuple
    message: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


@dataclass(frozen=True, eq=True)
class SimilarityModel:
    states: tuple
    abilities: frozenset
    edges: Mapping = field(hash=False)
    capability: Mapping = field(hash=False)
    valuation: Mapping = field(hash=False)

    @classmethod
    def create(cls, states: Iterable[str], abilities: Iterable[str], edges,
               capability: Mapping[str, Iterable[str]],
               valuation: Mapping[str, Iterable[str]]) -> "SimilarityModel":
        """Build a model from an unordered edge listing.

        ``edges`` maps a pair ``(s, t)`` (or is an iterable of ``((s, t), labels)``)
        and is mirrored to ``(t, s)``.  Empty labels are dropped.
        """
        items = edges.items() if isinstance(edges, Mapping) else edges
        table: dict[tuple[str, str], frozenset] = {}
        for (s, t), labels in items:
            labels = frozenset(labels)
            if labels:
                table[(s, t)] = labels
                table[(t, s)] = labels
        states = tuple(sorted(states))
        return cls(
            states=states,
            abilities=frozenset(abilities),
            edges=table,
            capability={a: frozenset(c) for a, c in sorted(capability.items())},
            valuation={s: frozenset(valuation.get(s, ())) for s in states},
        )

    @property
    def agents(self) -> tuple:
        return tuple(sorted(self.capability))

    def edge(self, s: str, t: str) -> frozenset:
        return self.edges.get((s, t), frozenset())

    def props(self, s: str) -> frozenset:
        return self.valuation.get(s, frozenset())

    def adjacency_text(self) -> str:
        """Plain-text dump of the model for terminal output."""
        lines = [f"A = {{{', '.join(sorted(self.abilities))}}}"]
        for a in self.agents:
            lines.append(f"C({a}) = {{{', '.join(sorted(self.capability[a]))}}}")
        for s in self.states:
            lines.append(f"{s}: {' '.join(sorted(self.props(s))) or '-'}")
        for i, s in enumerate(self.states):
            for t in self.states[i:]:
                lab = self.edge(s, t)
                if lab:
                    lines.append(f"  {s} -- {t}: {{{', '.join(sorted(lab))}}}")
        return "\n".join(lines)


@dataclass(frozen=True)
class PointedModel:
    model: SimilarityModel
    point: str

    def __post_init__(self):
        if self.point not in self.model.states:
            raise ModelError(f"point {self.point!r} is not a state of the model")


def validate(m: SimilarityModel) -> list[Violation]:
    """Every positivity, symmetry and reference-integrity violation of ``m``."""
    out: list[Violation] = []
    states = set(m.states)
    if not m.states:
        out.append(Violation("reference", (), "model has no states"))
    if len(states) != len(m.states):
        out.append(Violation("reference", (), "duplicate state names"))
    for (s, t), labels in sorted(m.edges.items(), key=lambda kv: kv[0]):
        if s not in states or t not in states:
            out.append(Violation("reference", (s, t), f"edge ({s}, {t}) names an unknown state"))
        stray = labels - m.abilities
        if stray:
            out.append(Violation("reference", (s, t),
                                 f"edge ({s}, {t}) uses unknown abilities {sorted(stray)}"))
        if m.edge(t, s) != labels:
            out.append(Violation("symmetry", (s, t),
                                 f"E({s},{t}) = {sorted(labels)} but E({t},{s}) = {sorted(m.edge(t, s))}"))
        if s != t and labels == m.abilities:
            if s < t or m.edge(t, s) != labels:
                out.append(Violation("positivity", (s, t),
                                     f"E({s},{t}) is the full ability set but {s} != {t}"))
    if not m.abilities:
        # with A empty every pair has E(s,t) = A
        for i, s in enumerate(m.states):
            for t in m.states[i + 1:]:
                out.append(Violation("positivity", (s, t),
                                     f"E({s},{t}) is the full (empty) ability set but {s} != {t}"))
    for a, caps in m.capability.items():
        stray = caps - m.abilities
        if stray:
            out.append(Violation("reference", (a,), f"C({a}) uses unknown abilities {sorted(stray)}"))
    for s in m.valuation:
        if s not in states:
            out.append(Violation("reference", (s,), f"valuation names unknown state {s!r}"))
    return out


def group_abilities(m: SimilarityModel, group: Iterable[str], mode: str = "union") -> frozenset:
    """Pooled (``union``) or shared (``intersection``) abilities of a group."""
    group = sorted(set(group))
    if not group:
        raise ModelError("empty group")
    unknown = [a for a in group if a not in m.capability]
    if unknown:
        raise ModelError(f"unknown agents {unknown}")
    caps = [m.capability[a] for a in group]
    if mode == "union":
        return frozenset().union(*caps)
    if mode == "intersection":
        return frozenset.intersection(*caps)
    raise ValueError(f"mode must be 'union' or 'intersection', not {mode!r}")


# ------------------------------------------------------------ serialization

MODEL_SCHEMA = {
    "type": "object",
    "required": ["states", "abilities", "agents", "edges", "valuation"],
    "properties": {
        "format": {"const": FORMAT_VERSION},
        "states": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "abilities": {"type": "array", "items": {"type": "string"}},
        "agents": {"type": "object",
                   "additionalProperties": {"type": "array", "items": {"type": "string"}}},
        "edges": {"type": "array", "items": {
            "type": "object",
            "required": ["pair", "labels"],
            "properties": {
                "pair": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2},
                "labels": {"type": "array", "items": {"type": "string"}},
            },
            "additionalProperties": False,
        }},
        "valuation": {"type": "object",
                      "additionalProperties": {"type": "array", "items": {"type": "string"}}},
    },
    "additionalProperties": False,
}


def _decode(data: bytes | str) -> dict:
    try:
        doc = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelError(f"not valid JSON: {exc}") from None
    return doc


def load(data: bytes | str, check: bool = True) -> SimilarityModel:
    """Parse a ``.model`` document.  Raises :class:`ModelError`.

    With ``check=False`` positivity and symmetry are left to :func:`validate`.
    """
    doc = _decode(data)
    try:
        jsonschema.validate(doc, MODEL_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ModelError(f"schema error at {path}: {exc.message}") from None

    states = doc["states"]
    seen: set[str] = set()
    for s in states:
        if s in seen:
            raise ModelError(f"duplicate state {s!r}")
        seen.add(s)
    abilities = set(doc["abilities"])
    if len(abilities) != len(doc["abilities"]):
        raise ModelError("duplicate ability")

    listed: dict[tuple[str, str], frozenset] = {}
    for entry in doc["edges"]:
        s, t = entry["pair"]
        labels = frozenset(entry["labels"])
        for x in (s, t):
            if x not in seen:
                raise ModelError(f"edge ({s}, {t}) names unknown state {x!r}")
        stray = labels - abilities
        if stray:
            raise ModelError(f"edge ({s}, {t}) names unknown abilities {sorted(stray)}")
        for key in ((s, t), (t, s)):
            if key in listed and listed[key] != labels:
                raise ModelError(f"pair ({s}, {t}) listed twice with different labels")
        listed[(s, t)] = labels

    for a, caps in doc["agents"].items():
        stray = set(caps) - abilities
        if stray:
            raise ModelError(f"capability of agent {a!r} names unknown abilities {sorted(stray)}")
    for s in doc["valuation"]:
        if s not in seen:
            raise ModelError(f"valuation names unknown state {s!r}")

    m = SimilarityModel.create(states, abilities, listed, doc["agents"], doc["valuation"])
    problems = validate(m) if check else []
    if problems:
        raise ModelError("invalid model: " + "; ".join(map(str, problems)))
    return m


def to_document(m: SimilarityModel) -> dict:
    """The canonical JSON object for ``m``."""
    edges = []
    for s in m.states:
        for t in m.states:
            if s <= t and m.edge(s, t):
                edges.append({"pair": [s, t], "labels": sorted(m.edge(s, t))})
    return {
        "format": FORMAT_VERSION,
        "states": sorted(m.states),
        "abilities": sorted(m.abilities),
        "agents": {a: sorted(m.capability[a]) for a in sorted(m.capability)},
        "edges": edges,
        "valuation": {s: sorted(m.props(s)) for s in sorted(m.states)},
    }


def save(m: SimilarityModel) -> bytes:
    return (json.dumps(to_document(m), indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def load_file(path: str | Path, check: bool = True) -> SimilarityModel:
    return load(Path(path).read_bytes(), check)


# ------------------------------------------------------------ Kripke models

@dataclass(frozen=True)
class KripkeModel:
    states: tuple
    relations: Mapping = field(hash=False)  # agent -> frozenset of (s, t)
    valuation: Mapping = field(hash=False)  # proposition -> frozenset of states

    @classmethod
    def create(cls, states, relations, valuation) -> "KripkeModel":
        return cls(tuple(sorted(states)),
                   {a: frozenset(tuple(p) for p in r) for a, r in sorted(relations.items())},
                   {p: frozenset(v) for p, v in sorted(valuation.items())})

    @property
    def agents(self) -> tuple:
        return tuple(sorted(self.relations))

    def is_symmetric(self) -> bool:
        return all((t, s) in r for r in self.relations.values() for s, t in r)


KRIPKE_SCHEMA = {
    "type": "object",
    "required": ["states", "relations", "valuation"],
    "properties": {
        "format": {"const": FORMAT_VERSION},
        "kind": {"const": "kripke"},
        "states": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "relations": {"type": "object", "additionalProperties": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2}}},
        "valuation": {"type": "object",
                      "additionalProperties": {"type": "array", "items": {"type": "string"}}},
    },
    "additionalProperties": False,
}


def load_kripke(data: bytes | str) -> KripkeModel:
    doc = _decode(data)
    try:
        jsonschema.validate(doc, KRIPKE_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ModelError(f"schema error: {exc.message}") from None
    states = set(doc["states"])
    if len(states) != len(doc["states"]):
        raise ModelError("duplicate state")
    for a, pairs in doc["relations"].items():
        for s, t in pairs:
            if s not in states or t not in states:
                raise ModelError(f"relation of {a!r} names an unknown state")
    for p, ss in doc["valuation"].items():
        if not set(ss) <= states:
            raise ModelError(f"valuation of {p!r} names an unknown state")
    return KripkeModel.create(doc["states"], doc["relations"], doc["valuation"])


def save_kripke(n: KripkeModel) -> bytes:
    doc = {
        "format": FORMAT_VERSION,
        "kind": "kripke",
        "states": list(n.states),
        "relations": {a: sorted(map(list, r)) for a, r in n.relations.items()},
        "valuation": {p: sorted(v) for p, v in n.valuation.items()},
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def fresh_name(taken: Iterable[str], base: str = "b_fresh") -> str:
    taken = set(taken)
    name, i = base, 0
    while name in taken:
        i += 1
        name = f"{base}{i}"
    return name


def translate_kripke(n: KripkeModel) -> SimilarityModel:
    """Embed a symmetric Kripke model: agents become abilities, plus one unused one.

    ``E(s,t)`` is the set of agents whose relation contains ``(s,t)`` and
    ``C(a) = {a}``.  The extra ability keeps every edge short of the full set,
    so positivity holds.
    """
    if not n.is_symmetric():
        bad = sorted(a for a, r in n.relations.items() if any((t, s) not in r for s, t in r))
        raise ModelError(f"relations of agents {bad} are not symmetric")
    agents = n.agents
    extra = fresh_name(agents)
    edges: dict[tuple[str, str], set] = {}
    for a in agents:
        for s, t in n.relations[a]:
            edges.setdefault((s, t), set()).add(a)
    valuation = {s: {p for p, ext in n.valuation.items() if s in ext} for s in n.states}
    return SimilarityModel.create(n.states, set(agents) | {extra}, edges,
                                  {a: {a} for a in agents}, valuation)


# ------------------------------------------------------------------ corpus

def corpus_names() -> list[str]:
    root = resources.files("simlogic") / "data" / "models"
    return sorted(p.name[: -len(".model")] for p in root.iterdir() if p.name.endswith(".model"))


def corpus_path(name: str) -> Path:
    name = name[: -len(".model")] if name.endswith(".model") else name
    path = Path(str(resources.files("simlogic") / "data" / "models" / f"{name}.model"))
    if not path.exists():
        raise ModelError(f"no bundled model named {name!r}; have {corpus_names()}")
    return path


def corpus_model(name: str) -> SimilarityModel:
    """One of the bundled models, e.g. ``"example1"``."""
    return load_file(corpus_path(name))
