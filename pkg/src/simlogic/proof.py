"""Hilbert-style proof checking for EL, ELC, ..., ELCDF, and closure sets.

Before any matching, formulas are reduced to the primitive grammar with
:func:`simlogic.syntax.desugar`, so axioms and rules are stated once over
``~``, ``->``, ``K``, ``C``, ``D`` and ``F``.  Big conjunctions over a group
are taken in sorted agent order, nested to the left.

Proof files hold one step per line::

    3. K a (p | ~p) ; NecK a 1

Justifications: ``Premise``, an axiom name (``PL K B C1 KD D1 D2 BD KF F1
F2 BF``, optionally prefixed by ``Axiom``), ``MP i j``, ``NecK a i``,
``NF {a,b} i`` and ``C2 i``.  Rules other than MP only apply to lines that
do not depend on premises.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .syntax import (And, Atom, Bottom, Common, Distributed, Field, Formula,
                     Fragment, Implies, Know, Neg, ParseError, Top, complement,
                     conjunction, desugar, fragment_of, groups_of, parse,
                     subformulas)

SCHEME_ORDER = ("K", "B", "C1", "KD", "D1", "D2", "BD", "KF", "F1", "F2", "BF", "PL")


@dataclass(frozen=True)
class AxiomSystem:
    name: str
    fragment: Fragment
    schemes: tuple
    rules: tuple

    def __str__(self) -> str:
        return self.name


def system(name: str) -> AxiomSystem:
    """The axiom system for one of the eight languages, e.g. ``system("ELCF")``."""
    frag = Fragment.from_name(name)
    schemes = ["PL", "K", "B"]
    rules = ["MP", "NecK"]
    if frag.uses_common:
        schemes.append("C1")
        rules.append("C2")
    if frag.uses_distributed:
        schemes += ["KD", "D1", "D2", "BD"]
    if frag.uses_field:
        schemes += ["KF", "F1", "F2", "BF"]
        rules.append("NF")
    return AxiomSystem(frag.name, frag, tuple(s for s in SCHEME_ORDER if s in schemes), tuple(rules))


# ------------------------------------------------------------ recognizers

def _as_and(f: Formula):
    match f:
        case Neg(Implies(x, Neg(y))):
            return x, y
    return None


def _as_iff(f: Formula):
    parts = _as_and(f)
    if parts is None:
        return None
    match parts:
        case (Implies(x, y), Implies(y2, x2)) if x == x2 and y == y2:
            return x, y
    return None


def big_and(parts: list[Formula]) -> Formula:
    return desugar(conjunction(parts))


def _boolean_atoms(f: Formula, out: list) -> None:
    match f:
        case Neg(x):
            _boolean_atoms(x, out)
        case Implies(x, y):
            _boolean_atoms(x, out)
            _boolean_atoms(y, out)
        case Top() | Bottom():
            pass
        case _:
            if f not in out:
                out.append(f)


def _truth(f: Formula, row: dict) -> bool:
    match f:
        case Neg(x):
            return not _truth(x, row)
        case Implies(x, y):
            return (not _truth(x, row)) or _truth(y, row)
        case Top():
            return True
        case Bottom():
            return False
    return row[f]


def is_tautology(f: Formula, max_atoms: int = 20) -> bool:
    """Propositional validity, with maximal modal subformulas as atoms."""
    f = desugar(f)
    letters: list[Formula] = []
    _boolean_atoms(f, letters)
    if len(letters) > max_atoms:
        raise ValueError(f"{len(letters)} propositional letters exceed the truth-table limit")
    for values in itertools.product((False, True), repeat=len(letters)):
        if not _truth(f, dict(zip(letters, values))):
            return False
    return True


def _match_one(name: str, f: Formula):
    """Binding under which primitive ``f`` instantiates scheme ``name``, else None."""
    match name, f:
        case "K", Implies(Know(a, Implies(x, y)), Implies(Know(a2, x2), Know(a3, y2))) \
                if a == a2 == a3 and x == x2 and y == y2:
            return {"a": a, "phi": x, "psi": y}
        case "KD", Implies(Distributed(g, Implies(x, y)), Implies(Distributed(g2, x2), Distributed(g3, y2))) \
                if g == g2 == g3 and x == x2 and y == y2:
            return {"G": g, "phi": x, "psi": y}
        case "KF", Implies(Field(g, Implies(x, y)), Implies(Field(g2, x2), Field(g3, y2))) \
                if g == g2 == g3 and x == x2 and y == y2:
            return {"G": g, "phi": x, "psi": y}
        case "B", Implies(x, Know(a, Neg(Know(a2, Neg(x2))))) if a == a2 and x == x2:
            return {"a": a, "phi": x}
        case "BD", Implies(x, Distributed(g, Neg(Distributed(g2, Neg(x2))))) if g == g2 and x == x2:
            return {"G": g, "phi": x}
        case "BF", Implies(x, Field(g, Neg(Field(g2, Neg(x2))))) if g == g2 and x == x2:
            return {"G": g, "phi": x}
        case "D2", Implies(Distributed(g, x), Distributed(h, x2)) if x == x2 and g <= h:
            return {"G": g, "H": h, "phi": x}
        case "F2", Implies(Field(g, x), Field(h, x2)) if x == x2 and h <= g:
            return {"G": g, "H": h, "phi": x}
        case "C1", Implies(Common(g, x), rhs):
            expected = big_and([Know(a, And(x, Common(g, x))) for a in sorted(g)])
            if rhs == expected:
                return {"G": g, "phi": x}
        case "D1" | "F1", _:
            parts = _as_iff(f)
            op = Distributed if name == "D1" else Field
            match parts:
                case (op_node, Know(a, x2)) if type(op_node) is op and op_node.group == {a} \
                        and op_node.child == x2:
                    return {"a": a, "phi": x2}
        case "PL", _:
            if is_tautology(f):
                return {}
    return None


def match_scheme(name: str, f: Formula):
    return _match_one(name, desugar(f))


def match_axiom(f: Formula, sys: AxiomSystem):
    """``(scheme name, binding)`` for the first scheme of ``sys`` that ``f`` instantiates."""
    prim = desugar(f)
    if not fragment_of(f) <= sys.fragment:
        return None
    for name in sys.schemes:
        binding = _match_one(name, prim)
        if binding is not None:
            return name, binding
    return None


# ---------------------------------------------------------------- scripts

@dataclass(frozen=True)
class Justification:
    rule: str  # "Premise", "Axiom", "MP", "NecK", "NF", "C2"
    refs: tuple = ()
    axiom: str | None = None
    agent: str | None = None
    group: frozenset | None = None

    def __str__(self) -> str:
        if self.rule == "Axiom":
            return self.axiom
        extra = []
        if self.agent:
            extra.append(self.agent)
        if self.group:
            extra.append("{" + ",".join(sorted(self.group)) + "}")
        return " ".join([self.rule, *extra, *map(str, self.refs)])


@dataclass(frozen=True)
class ProofLine:
    number: int
    formula: Formula
    justification: Justification


@dataclass
class ProofScript:
    lines: list[ProofLine] = field(default_factory=list)

    @property
    def conclusion(self) -> Formula | None:
        return self.lines[-1].formula if self.lines else None


class ProofSyntaxError(ValueError):
    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


_JUST_RE = re.compile(r"""
    ^(?:(?P<premise>Premise)
      |(?:Axiom\s+)?(?P<axiom>PL|K|B|C1|KD|D1|D2|BD|KF|F1|F2|BF)
      |MP\s+(?P<mp1>\d+)\s*,?\s*(?P<mp2>\d+)
      |NecK\s+(?P<agent>[A-Za-z][A-Za-z0-9_]*)\s+(?P<nec>\d+)
      |NF\s+\{(?P<group>[^}]*)\}\s*(?P<nf>\d+)
      |C2\s+(?P<c2>\d+)
    )$""", re.VERBOSE)


def parse_justification(text: str, line_no: int = 0) -> Justification:
    m = _JUST_RE.match(text.strip())
    if not m:
        raise ProofSyntaxError(f"malformed justification {text.strip()!r}", line_no)
    if m["premise"]:
        return Justification("Premise")
    if m["axiom"]:
        return Justification("Axiom", axiom=m["axiom"])
    if m["mp1"]:
        return Justification("MP", (int(m["mp1"]), int(m["mp2"])))
    if m["nec"]:
        return Justification("NecK", (int(m["nec"]),), agent=m["agent"])
    if m["nf"]:
        members = [x.strip() for x in m["group"].split(",") if x.strip()]
        if not members:
            raise ProofSyntaxError("empty group in NF", line_no)
        return Justification("NF", (int(m["nf"]),), group=frozenset(members))
    return Justification("C2", (int(m["c2"]),))


def parse_script(text: str) -> ProofScript:
    """Read the ``n. <formula> ; <justification>`` format; ``#`` starts a comment."""
    script = ProofScript()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.match(r"^(\d+)\.\s*(.*?)\s*;\s*(.*)$", line)
        if not m:
            raise ProofSyntaxError("expected 'n. <formula> ; <justification>'", line_no)
        try:
            formula = parse(m[2])
        except ParseError as exc:
            raise ProofSyntaxError(str(exc), line_no) from None
        script.lines.append(ProofLine(int(m[1]), formula, parse_justification(m[3], line_no)))
    return script


def render_script(script: ProofScript) -> str:
    from .syntax import render
    return "".join(f"{ln.number}. {render(ln.formula)} ; {ln.justification}\n" for ln in script.lines)


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    line: int | None = None
    reason: str = ""
    theorems: tuple = ()  # premise-free formulas established by the script

    def __str__(self) -> str:
        if self.accepted:
            return "accepted"
        where = "" if self.line is None else f" at line {self.line}"
        return f"rejected{where}: {self.reason}"


def check_proof(script: ProofScript, sys: AxiomSystem) -> Verdict:
    """Accept iff every line is a premise, an axiom of ``sys``, or follows by one of its rules."""
    prim: dict[int, Formula] = {}
    from_premises: dict[int, bool] = {}
    theorems = []

    def reject(ln, reason):
        return Verdict(False, ln.number, reason)

    if not script.lines:
        return Verdict(False, None, "empty proof")
    for ln in script.lines:
        if ln.number in prim:
            return reject(ln, "duplicate line number")
        if not fragment_of(ln.formula) <= sys.fragment:
            return reject(ln, f"formula is outside the language of {sys.name}")
        j = ln.justification
        for r in j.refs:
            if r not in prim:
                return reject(ln, f"reference to line {r}, which does not precede this line")
        if j.rule not in ("Premise", "Axiom") and j.rule not in sys.rules:
            return reject(ln, f"rule {j.rule} is not part of {sys.name}")
        cur = desugar(ln.formula)
        uses_premise = any(from_premises[r] for r in j.refs)

        if j.rule == "Premise":
            uses_premise = True
        elif j.rule == "Axiom":
            if j.axiom not in sys.schemes:
                return reject(ln, f"axiom {j.axiom} is not part of {sys.name}")
            if _match_one(j.axiom, cur) is None:
                return reject(ln, f"not an instance of {j.axiom}")
        elif j.rule == "MP":
            i, k = j.refs
            if prim[k] != Implies(prim[i], cur) and prim[i] != Implies(prim[k], cur):
                return reject(ln, f"modus ponens does not apply to lines {i} and {k}")
        elif j.rule in ("NecK", "NF", "C2"):
            (i,) = j.refs
            if from_premises[i]:
                return reject(ln, f"{'necessitation' if j.rule != 'C2' else 'C2'} on premise")
            if j.rule == "NecK":
                if cur != Know(j.agent, prim[i]):
                    return reject(ln, f"expected K {j.agent} applied to line {i}")
            elif j.rule == "NF":
                if cur != Field(j.group, prim[i]):
                    return reject(ln, f"expected F applied to line {i}")
            else:
                match cur:
                    case Implies(x, Common(g, y)):
                        expected = Implies(x, big_and([Know(a, And(x, y)) for a in sorted(g)]))
                        if prim[i] != desugar(expected):
                            return reject(ln, f"line {i} does not have the C2 premise shape")
                    case _:
                        return reject(ln, "C2 concludes a formula of the form psi -> C_G chi")
        prim[ln.number] = cur
        from_premises[ln.number] = uses_premise
        if not uses_premise:
            theorems.append(ln.formula)
    return Verdict(True, theorems=tuple(theorems))


# ----------------------------------------------------------------- closure

def closure(f: Formula, sys: AxiomSystem) -> frozenset:
    """Least set containing ``f`` closed under the closure clauses of ``sys``.

    Only clauses for operators of ``sys`` are applied: the D-clauses need D,
    the F-clauses need F, the C-clause needs C.  Groups for the D/F
    widening clauses are those written in ``f``.
    """
    if not fragment_of(f) <= sys.fragment:
        raise ValueError(f"formula is outside the language of {sys.name}")
    frag = sys.fragment
    root = desugar(f)
    groups = groups_of(root)
    out: set[Formula] = set()
    todo = [root]

    def add(g):
        if g not in out:
            todo.append(g)

    while todo:
        g = todo.pop()
        if g in out:
            continue
        out.add(g)
        for sub in subformulas(g):
            add(sub)
        add(complement(g))
        match g:
            case Know(a, x):
                if frag.uses_distributed:
                    add(Distributed({a}, x))
                if frag.uses_field:
                    add(Field({a}, x))
            case Distributed(grp, x) if frag.uses_distributed:
                if len(grp) == 1:
                    add(Know(next(iter(grp)), x))
                for h in groups:
                    add(Distributed(h, x))
            case Common(grp, x) if frag.uses_common:
                for a in grp:
                    add(Know(a, x))
                    add(Know(a, g))
            case Field(grp, x) if frag.uses_field:
                for a in grp:
                    add(Know(a, x))
                for h in groups:
                    add(Field(h, x))
    return frozenset(out)


def closure_violations(cl: frozenset, f: Formula, sys: AxiomSystem) -> list[str]:
    """Membership checks of each clause against a candidate closure set."""
    frag = sys.fragment
    root = desugar(f)
    groups = groups_of(root)
    problems = []

    def need(g, clause, source):
        if g not in cl:
            problems.append(f"clause {clause}: {source} requires {g}")

    if root not in cl:
        problems.append("clause 1: the formula itself is missing")
    for g in cl:
        for s in subformulas(g):
            need(s, 2, g)
        need(complement(g), 3, g)
        if isinstance(g, Know):
            if frag.uses_distributed:
                need(Distributed({g.agent}, g.child), 4, g)
            if frag.uses_field:
                need(Field({g.agent}, g.child), 4, g)
        if isinstance(g, Distributed) and frag.uses_distributed:
            if len(g.group) == 1:
                need(Know(min(g.group), g.child), 5, g)
            for h in groups:
                need(Distributed(h, g.child), 6, g)
        if isinstance(g, Common) and frag.uses_common:
            for a in g.group:
                need(Know(a, g.child), 7, g)
                need(Know(a, g), 7, g)
        if isinstance(g, Field) and frag.uses_field:
            for a in g.group:
                need(Know(a, g.child), 8, g)
            for h in groups:
                need(Field(h, g.child), 9, g)
    return problems


# ------------------------------------------------------------------ corpus

def corpus_proofs() -> dict[str, Path]:
    """Bundled proof scripts by file stem."""
    root = resources.files("simlogic") / "data" / "proofs"
    return {p.name[:-len(".proof")]: Path(str(p)) for p in sorted(root.iterdir(), key=lambda p: p.name)
            if p.name.endswith(".proof")}


def load_script(path: str | Path) -> ProofScript:
    return parse_script(Path(path).read_text(encoding="utf-8"))


def script_system(path: str | Path) -> str | None:
    """System named by a ``# system: ELD`` header line, if present."""
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        m = re.match(r"#\s*system:\s*(\w+)", line.strip())
        if m:
            return m[1]
    return None


__all__ = [
    "AxiomSystem", "system", "match_axiom", "match_scheme", "is_tautology",
    "Justification", "ProofLine", "ProofScript", "ProofSyntaxError", "Verdict",
    "parse_script", "parse_justification", "render_script", "check_proof",
    "closure", "closure_violations", "corpus_proofs", "load_script", "script_system",
    "big_and",
]
