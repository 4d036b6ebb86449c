"""Formulas of the eight epistemic languages EL ... ELCDF.

The concrete syntax is::

    formula  ::= iff
    iff      ::= imp ( "<->" iff )?
    imp      ::= or ( "->" imp )?
    or       ::= and ( "|" and )*
    and      ::= unary ( "&" unary )*
    unary    ::= "~" unary
               | "K" AGENT unary
               | ("E" | "C" | "D" | "F") GROUP unary
               | atom | "true" | "false" | "$" IDENT | "(" formula ")"
    GROUP    ::= "{" AGENT ("," AGENT)* "}"

Identifiers match ``[a-zA-Z][a-zA-Z0-9_]*``.  ``K E C D F true false`` are
reserved.  ``¬ ∧ ∨ → ↔ ⊤ ⊥`` are accepted as alternative spellings.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator

__all__ = [
    "Formula", "Atom", "Top", "Bottom", "Meta", "Neg", "Implies", "And", "Or",
    "Iff", "Know", "Mutual", "Common", "Distributed", "Field",
    "Fragment", "ParseError", "parse", "parse_lines", "render", "fragment_of",
    "desugar_mutual", "desugar", "complement", "subformulas", "conjunction",
    "modal_depth", "size", "atoms_of", "agents_of", "groups_of",
    "enumerate_formulas", "all_groups",
]


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True)
class Meta(Formula):
    """Formula metavariable, only meaningful inside scheme templates."""

    name: str


@dataclass(frozen=True)
class Neg(Formula):
    child: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Know(Formula):
    agent: str
    child: Formula


@dataclass(frozen=True)
class _GroupOp(Formula):
    group: frozenset
    child: Formula

    def __post_init__(self):
        if not isinstance(self.group, frozenset):
            object.__setattr__(self, "group", frozenset(self.group))
        if not self.group:
            raise ValueError(f"{type(self).__name__}: group must be nonempty")


@dataclass(frozen=True)
class Mutual(_GroupOp):
    pass


@dataclass(frozen=True)
class Common(_GroupOp):
    pass


@dataclass(frozen=True)
class Distributed(_GroupOp):
    pass


@dataclass(frozen=True)
class Field(_GroupOp):
    pass


_GROUP_KEYWORD = {Mutual: "E", Common: "C", Distributed: "D", Field: "F"}
_KEYWORD_GROUP = {v: k for k, v in _GROUP_KEYWORD.items()}
_BINARY = {Implies: "->", And: "&", Or: "|", Iff: "<->"}
_MODAL = (Know, Mutual, Common, Distributed, Field)

RESERVED = frozenset({"K", "E", "C", "D", "F", "true", "false"})


# ---------------------------------------------------------------- fragments

@dataclass(frozen=True)
class Fragment:
    uses_common: bool = False
    uses_distributed: bool = False
    uses_field: bool = False

    @property
    def name(self) -> str:
        return "EL" + "C" * self.uses_common + "D" * self.uses_distributed + "F" * self.uses_field

    @classmethod
    def from_name(cls, name: str) -> "Fragment":
        m = re.fullmatch(r"EL(C?)(D?)(F?)", name.strip().upper())
        if not m:
            raise ValueError(f"unknown language {name!r}; expected one of EL, ELC, ..., ELCDF")
        return cls(*(bool(g) for g in m.groups()))

    def __le__(self, other: "Fragment") -> bool:  # type: ignore[override]
        return ((not self.uses_common or other.uses_common)
                and (not self.uses_distributed or other.uses_distributed)
                and (not self.uses_field or other.uses_field))

    def __or__(self, other: "Fragment") -> "Fragment":
        return Fragment(self.uses_common or other.uses_common,
                        self.uses_distributed or other.uses_distributed,
                        self.uses_field or other.uses_field)

    def __str__(self) -> str:
        return self.name


ALL_FRAGMENTS = tuple(Fragment(c, d, f) for c in (False, True) for d in (False, True) for f in (False, True))


# ------------------------------------------------------------------- parser

class ParseError(ValueError):
    """Syntax error; ``offset`` is a byte offset into the UTF-8 encoded input."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset


_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<op><->|->|[~&|(){},$]|[¬∧∨→↔⊤⊥])
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
""", re.VERBOSE)

_ALIASES = {"¬": "~", "∧": "&", "∨": "|", "→": "->", "↔": "<->", "⊤": "true", "⊥": "false"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", len(text[:pos].encode()))
        offset = len(text[:pos].encode())
        if m.lastgroup == "op":
            tok = _ALIASES.get(m.group(), m.group())
            tokens.append(("ident" if tok in ("true", "false") else "op", tok, offset))
        elif m.lastgroup == "ident":
            tokens.append(("ident", m.group(), offset))
        pos = m.end()
    tokens.append(("end", "", len(text.encode())))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, tok, off = self.take()
        if tok != value or kind == "end":
            found = "end of input" if kind == "end" else repr(tok)
            raise ParseError(f"expected {value!r}, found {found}", off)

    def parse(self) -> Formula:
        f = self.iff()
        kind, tok, off = self.peek()
        if kind != "end":
            if tok == ")":
                raise ParseError("unbalanced parentheses: unexpected ')'", off)
            raise ParseError(f"unexpected token {tok!r}", off)
        return f

    def iff(self) -> Formula:
        left = self.imp()
        if self.peek()[1] == "<->":
            self.take()
            return Iff(left, self.iff())
        return left

    def imp(self) -> Formula:
        left = self.disj()
        if self.peek()[1] == "->":
            self.take()
            return Implies(left, self.imp())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek()[1] == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek()[1] == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def agent(self) -> str:
        kind, tok, off = self.take()
        if kind != "ident" or tok in RESERVED:
            raise ParseError(f"expected agent name, found {tok or 'end of input'!r}", off)
        return tok

    def group(self) -> frozenset:
        kind, tok, off = self.take()
        if tok != "{":
            raise ParseError(f"expected group literal '{{...}}', found {tok or 'end of input'!r}", off)
        if self.peek()[1] == "}":
            raise ParseError("empty group", off)
        members = [self.agent()]
        while self.peek()[1] == ",":
            self.take()
            members.append(self.agent())
        self.expect("}")
        return frozenset(members)

    def unary(self) -> Formula:
        kind, tok, off = self.take()
        if kind == "end":
            raise ParseError("unexpected end of input", off)
        if tok == "~":
            return Neg(self.unary())
        if tok == "(":
            f = self.iff()
            k2, t2, o2 = self.peek()
            if t2 != ")":
                raise ParseError("unbalanced parentheses: expected ')'", o2)
            self.take()
            return f
        if tok == "$":
            k2, name, o2 = self.take()
            if k2 != "ident":
                raise ParseError("expected metavariable name after '$'", o2)
            return Meta(name)
        if kind == "ident":
            if tok == "K":
                a = self.agent()
                return Know(a, self.unary())
            if tok in _KEYWORD_GROUP:
                g = self.group()
                return _KEYWORD_GROUP[tok](g, self.unary())
            if tok == "true":
                return Top()
            if tok == "false":
                return Bottom()
            return Atom(tok)
        raise ParseError(f"unknown operator {tok!r}", off)


def parse(text: str) -> Formula:
    """Parse ``text`` into a formula.  Raises :class:`ParseError`."""
    return _Parser(text).parse()


def parse_lines(text: str) -> list[Formula]:
    """One formula per non-blank line; ``#`` starts a comment.

    Error offsets are relative to the offending line.
    """
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(parse(line))
    return out


# ---------------------------------------------------------------- rendering

def _prec(f: Formula) -> int:
    if isinstance(f, Iff):
        return 1
    if isinstance(f, Implies):
        return 2
    if isinstance(f, Or):
        return 3
    if isinstance(f, And):
        return 4
    return 5


def _group_text(g: Iterable[str]) -> str:
    return "{" + ",".join(sorted(g)) + "}"


def render(f: Formula) -> str:
    """Inverse of :func:`parse`, with minimal parentheses."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Meta):
        return "$" + f.name
    if isinstance(f, Neg):
        return "~" + _operand(f.child)
    if isinstance(f, Know):
        return f"K {f.agent} " + _operand(f.child)
    if isinstance(f, _GroupOp):
        return f"{_GROUP_KEYWORD[type(f)]} {_group_text(f.group)} " + _operand(f.child)
    op = _BINARY[type(f)]
    p = _prec(f)
    left, right = render(f.left), render(f.right)
    if isinstance(f, (Implies, Iff)):
        # right-associative
        if _prec(f.left) <= p:
            left = f"({left})"
        if _prec(f.right) < p:
            right = f"({right})"
    else:
        if _prec(f.left) < p:
            left = f"({left})"
        if _prec(f.right) <= p:
            right = f"({right})"
    return f"{left} {op} {right}"


def _operand(f: Formula) -> str:
    text = render(f)
    return f"({text})" if _prec(f) < 5 else text


# ----------------------------------------------------------- classification

def fragment_of(f: Formula) -> Fragment:
    """Smallest of the eight languages containing ``f``.  E does not count."""
    c = d = fl = False
    for g in _walk(f):
        c |= isinstance(g, Common)
        d |= isinstance(g, Distributed)
        fl |= isinstance(g, Field)
    return Fragment(c, d, fl)


def _children(f: Formula) -> tuple:
    if isinstance(f, (Neg, Know, _GroupOp)):
        return (f.child,)
    if isinstance(f, (Implies, And, Or, Iff)):
        return (f.left, f.right)
    return ()


def _walk(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(_children(g))


def modal_depth(f: Formula) -> int:
    sub = [modal_depth(c) for c in _children(f)]
    return max(sub, default=0) + isinstance(f, _MODAL)


def size(f: Formula) -> int:
    return 1 + sum(size(c) for c in _children(f))


def atoms_of(f: Formula) -> set[str]:
    return {g.name for g in _walk(f) if isinstance(g, Atom)}


def agents_of(f: Formula) -> set[str]:
    out: set[str] = set()
    for g in _walk(f):
        if isinstance(g, Know):
            out.add(g.agent)
        elif isinstance(g, _GroupOp):
            out |= g.group
    return out


def groups_of(f: Formula) -> set[frozenset]:
    """Group subscripts of E/C/D/F occurring in ``f``."""
    return {g.group for g in _walk(f) if isinstance(g, _GroupOp)}


# --------------------------------------------------------------- rewriting

def conjunction(parts: list[Formula]) -> Formula:
    """Left-nested conjunction of a nonempty list."""
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def _map(f: Formula, fn) -> Formula:
    if isinstance(f, Neg):
        return Neg(fn(f.child))
    if isinstance(f, Know):
        return Know(f.agent, fn(f.child))
    if isinstance(f, _GroupOp):
        return type(f)(f.group, fn(f.child))
    if isinstance(f, (Implies, And, Or, Iff)):
        return type(f)(fn(f.left), fn(f.right))
    return f


def desugar_mutual(f: Formula) -> Formula:
    """Replace every E_G psi by K_a psi & K_b psi & ... in sorted agent order."""
    if isinstance(f, Mutual):
        body = desugar_mutual(f.child)
        return conjunction([Know(a, body) for a in sorted(f.group)])
    return _map(f, desugar_mutual)


def desugar(f: Formula) -> Formula:
    """Reduce to the primitive grammar: atoms, constants, ~, ->, K, C, D, F.

    ``A & B`` becomes ``~(A -> ~B)``, ``A | B`` becomes ``~A -> B`` and
    ``A <-> B`` becomes ``(A -> B) & (B -> A)``.
    """
    if isinstance(f, Mutual):
        return desugar(desugar_mutual(f))
    if isinstance(f, And):
        return Neg(Implies(desugar(f.left), Neg(desugar(f.right))))
    if isinstance(f, Or):
        return Implies(Neg(desugar(f.left)), desugar(f.right))
    if isinstance(f, Iff):
        left, right = desugar(f.left), desugar(f.right)
        return Neg(Implies(Implies(left, right), Neg(Implies(right, left))))
    return _map(f, desugar)


def complement(f: Formula) -> Formula:
    """The ``~`` of closure sets: strip one negation, or add one."""
    return f.child if isinstance(f, Neg) else Neg(f)


def subformulas(f: Formula) -> set[Formula]:
    out: set[Formula] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in out:
            continue
        out.add(g)
        if isinstance(g, Mutual):
            stack.extend(Know(a, g.child) for a in g.group)
        stack.extend(_children(g))
    return out


# -------------------------------------------------------------- enumeration

def all_groups(agents: Iterable[str]) -> list[frozenset]:
    """Nonempty subsets of ``agents``, by size then lexicographically."""
    agents = sorted(set(agents))
    return [frozenset(c) for k in range(1, len(agents) + 1)
            for c in itertools.combinations(agents, k)]


def modal_constructors(agents: Iterable[str], fragment: Fragment) -> list:
    """One-argument callables building every modality the fragment allows."""
    agents = sorted(set(agents))
    groups = all_groups(agents)
    ops = [lambda x, a=a: Know(a, x) for a in agents]
    for enabled, cls in ((fragment.uses_common, Common),
                         (fragment.uses_distributed, Distributed),
                         (fragment.uses_field, Field)):
        if enabled:
            ops.extend(lambda x, g=g, cls=cls: cls(g, x) for g in groups)
    return ops


def enumerate_formulas(agents, atoms, fragment: Fragment, max_depth: int,
                       max_size: int) -> Iterator[Formula]:
    """All primitive formulas up to the given modal depth and node count.

    Yields in non-decreasing size.  Double negations are skipped.  The order
    within one size is fixed by construction, so the stream is deterministic.
    """
    ops = modal_constructors(agents, fragment)
    by_size: dict[int, list[tuple[Formula, int]]] = {1: [(Atom(p), 0) for p in atoms]}
    for n in range(1, max_size + 1):
        if n > 1:
            level: list[tuple[Formula, int]] = []
            for f, d in by_size[n - 1]:
                if not isinstance(f, Neg):
                    level.append((Neg(f), d))
            for op in ops:
                level.extend((op(f), d + 1) for f, d in by_size[n - 1] if d < max_depth)
            for k in range(1, n - 1):
                for f, d in by_size[k]:
                    for g, e in by_size[n - 1 - k]:
                        level.append((Implies(f, g), max(d, e)))
            by_size[n] = level
        for f, _ in by_size[n]:
            yield f
