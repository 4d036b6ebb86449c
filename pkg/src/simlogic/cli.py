"""``simlogic`` command line.

Exit status depends only on the verdict: 0 for true / accepted / nothing
found, 1 for false / witness / rejected, 2 for usage and data errors.
``--format json`` prints a report with ``verdict``, an optional ``witness``
and ``seconds``; everything except ``seconds`` is deterministic.
"""

from __future__ import annotations

import json
import os
import sys
import time
from pathlib import Path

import click
import jsonschema

from . import models, proof, reference, search, semantics
from .models import ModelError, PointedModel, SimilarityModel
from .proof import ProofSyntaxError
from .search import SearchBounds, SearchError
from .semantics import EvaluationError
from .syntax import Fragment, ParseError, fragment_of, parse, parse_lines, render

REPORT_VERSION = 1
BOUNDS_ENV = "SIMLOGIC_BOUNDS"

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2

_DATA_ERRORS = (ModelError, ParseError, ProofSyntaxError, SearchError, EvaluationError,
                OSError, ValueError)


class DataError(click.ClickException):
    exit_code = EXIT_ERROR


# ----------------------------------------------------------------- inputs

def resolve_model_path(ref: str) -> Path:
    """A file path, or the name of a bundled model."""
    path = Path(ref)
    if path.exists():
        return path
    try:
        return models.corpus_path(path.name)
    except ModelError:
        raise DataError(f"no such model file: {ref}") from None


def read_model(ref: str, check: bool = True) -> SimilarityModel:
    try:
        return models.load_file(resolve_model_path(ref), check)
    except ModelError as exc:
        raise DataError(f"{ref}: {exc}") from None


def read_pointed(ref: str, state: str | None = None) -> PointedModel:
    """``path@state``, or a path plus an explicit state."""
    path, sep, point = ref.rpartition("@")
    if not sep:
        path, point = ref, state
    elif state is not None and state != point:
        raise DataError(f"conflicting states {point!r} and {state!r}")
    if point is None:
        raise DataError(f"{ref}: no state given (use MODEL@STATE or --state)")
    m = read_model(path)
    if point not in m.states:
        raise DataError(f"{point!r} is not a state of {path}")
    return PointedModel(m, point)


def read_formula(text: str):
    """Inline formula text, or ``@path`` to a formula file holding exactly one formula."""
    try:
        if not text.startswith("@"):
            return parse(text)
        found = parse_lines(Path(text[1:]).read_text(encoding="utf-8"))
    except ParseError as exc:
        raise DataError(f"cannot parse formula: {exc}") from None
    except OSError as exc:
        raise DataError(str(exc)) from None
    if len(found) != 1:
        raise DataError(f"{text[1:]}: expected one formula, found {len(found)}")
    return found[0]


def read_fragment(name: str) -> Fragment:
    try:
        return Fragment.from_name(name)
    except ValueError as exc:
        raise DataError(str(exc)) from None


_NAMES = {"type": "array", "items": {"type": "string"}}
BOUNDS_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "max_states": {"type": "integer", "minimum": 1},
        "ability_pool": _NAMES,
        "agent_capabilities": {"type": "object", "additionalProperties": _NAMES},
        "atom_pool": _NAMES,
        "max_depth": {"type": "integer", "minimum": 0},
        "vary_capabilities": {"type": "boolean"},
        "max_models": {"type": "integer", "minimum": 1},
    },
}


def read_bounds(path: str | None, **overrides) -> SearchBounds:
    """Defaults, then a JSON bounds file (flag or environment), then flags."""
    fields: dict = {}
    path = path or os.environ.get(BOUNDS_ENV)
    if path:
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"bounds file {path}: {exc}") from None
        try:
            jsonschema.validate(doc, BOUNDS_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise DataError(f"bounds file {path}: schema: {exc.message}") from None
        fields.update(doc)
    fields.update({k: v for k, v in overrides.items() if v is not None})
    if "agent_capabilities" in fields:
        fields["agent_capabilities"] = {a: frozenset(c)
                                        for a, c in fields["agent_capabilities"].items()}
    for key in ("ability_pool", "atom_pool"):
        if key in fields:
            fields[key] = tuple(fields[key])
    try:
        return SearchBounds(**fields)
    except (SearchError, TypeError) as exc:
        raise DataError(f"bad bounds: {exc}") from None


def _parse_caps(specs: tuple[str, ...]) -> dict | None:
    """``a=x,y`` pairs into a capability map."""
    if not specs:
        return None
    out = {}
    for spec in specs:
        agent, sep, abilities = spec.partition("=")
        if not sep or not agent:
            raise DataError(f"capability must look like AGENT=ab1,ab2, got {spec!r}")
        out[agent] = frozenset(x for x in abilities.split(",") if x)
    return out


def _split(text: str | None) -> tuple | None:
    return None if text is None else tuple(x for x in text.split(",") if x)


# ---------------------------------------------------------------- reports

def witness_report(w: search.Witness) -> dict:
    out = {"formula": render(w.formula), "state": w.state, "model": models.to_document(w.model)}
    if w.other is not None:
        out["other"] = {"state": w.other.point, "model": models.to_document(w.other.model)}
    return out


def emit(fmt: str, command: str, verdict: str, ok: bool, lines: list[str], started: float,
         **fields) -> None:
    if fmt == "json":
        report = {"version": REPORT_VERSION, "command": command, "verdict": verdict, **fields,
                  "seconds": round(time.perf_counter() - started, 6)}
        click.echo(json.dumps(report, indent=2, sort_keys=True))
    else:
        for line in lines:
            click.echo(line)
    sys.exit(EXIT_OK if ok else EXIT_FAIL)


format_option = click.option("--format", "fmt", type=click.Choice(["human", "json"]),
                             default="human", show_default=True, help="Report style.")


def bounds_options(fn):
    opts = [
        click.option("--bounds", "bounds_file", type=click.Path(dir_okay=False),
                     help=f"JSON bounds file (default: ${BOUNDS_ENV})."),
        click.option("--max-states", type=click.IntRange(min=1)),
        click.option("--abilities", help="Comma-separated ability pool."),
        click.option("--cap", "caps", multiple=True, help="Capability, e.g. a=x,y (repeatable)."),
        click.option("--atoms", help="Comma-separated atom pool."),
        click.option("--vary-capabilities/--fixed-capabilities", default=None),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _bounds_from(bounds_file, max_states, abilities, caps, atoms, vary_capabilities):
    return read_bounds(bounds_file, max_states=max_states, ability_pool=_split(abilities),
                       agent_capabilities=_parse_caps(caps), atom_pool=_split(atoms),
                       vary_capabilities=vary_capabilities)


# ---------------------------------------------------------------- commands

class _Group(click.Group):
    """Reports data errors that escape a command as exit status 2."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except _DATA_ERRORS as exc:
            raise DataError(str(exc)) from None


@click.group(cls=_Group, context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(package_name="artifact")
def main():
    """Epistemic logic over similarity models."""


@main.command()
@click.option("--model", "model_ref", required=True, help="Model file, bundled name, or MODEL@STATE.")
@click.option("--state", help="Point of evaluation; omit to test truth at every state.")
@click.option("--formula", "formula_text", required=True, help="Formula text or @file.")
@format_option
def check(model_ref, state, formula_text, fmt):
    """Evaluate a formula at a state (or at every state)."""
    started = time.perf_counter()
    f = read_formula(formula_text)
    try:
        if state is None and "@" not in model_ref:
            m = read_model(model_ref)
            ext = semantics.extension(m, f)
            ok = ext == frozenset(m.states)
            emit(fmt, "check", "valid" if ok else "not valid", ok,
                 [f"{render(f)}: {'valid' if ok else 'not valid'} in {model_ref}",
                  f"true at: {', '.join(sorted(ext)) or '(none)'}"],
                 started, formula=render(f), extension=sorted(ext))
        p = read_pointed(model_ref, state)
        ok = semantics.satisfies(p.model, p.point, f)
    except EvaluationError as exc:
        raise DataError(str(exc)) from None
    emit(fmt, "check", "true" if ok else "false", ok,
         [f"{render(f)} is {'true' if ok else 'false'} at {p.point}"],
         started, formula=render(f), state=p.point)


@main.command("validate")
@click.option("--model", "model_ref", required=True)
@click.option("--adjacency", is_flag=True, help="Also print the edge table.")
@format_option
def validate_cmd(model_ref, adjacency, fmt):
    """Check positivity, symmetry and references of a model file."""
    started = time.perf_counter()
    m = read_model(model_ref, check=False)
    problems = models.validate(m)
    lines = [str(v) for v in problems] or [f"{model_ref}: valid model with {len(m.states)} states"]
    if adjacency:
        lines.append(m.adjacency_text())
    emit(fmt, "validate", "valid" if not problems else "invalid", not problems, lines, started,
         violations=[{"kind": v.kind, "where": list(v.where), "message": v.message}
                     for v in problems])


@main.command("search")
@click.option("--formula", "formula_text", required=True)
@bounds_options
@format_option
def search_cmd(formula_text, fmt, **bopts):
    """Look for a pointed model falsifying a formula."""
    started = time.perf_counter()
    f = read_formula(formula_text)
    b = _bounds_from(**bopts)
    try:
        out = search.find_countermodel(f, b)
    except SearchError as exc:
        raise DataError(str(exc)) from None
    _emit_outcome(fmt, "search", out, started, formula=render(f))


@main.command()
@click.option("--formula", "formula_text", required=True,
              help="Scheme with metavariables such as $phi.")
@click.option("--instantiation-depth", default=0, show_default=True, type=click.IntRange(min=0))
@click.option("--instance-size", default=3, show_default=True, type=click.IntRange(min=1))
@bounds_options
@format_option
def scheme(formula_text, instantiation_depth, instance_size, fmt, **bopts):
    """Search instances of a scheme for a countermodel."""
    started = time.perf_counter()
    f = read_formula(formula_text)
    b = _bounds_from(**bopts)
    try:
        out = search.check_scheme(f, b, instantiation_depth, instance_size)
    except SearchError as exc:
        raise DataError(str(exc)) from None
    _emit_outcome(fmt, "scheme", out, started, formula=render(f))


def _emit_outcome(fmt, command, out, started, **fields):
    if out.found:
        lines = [f"witness: {out}", out.model.adjacency_text()]
        emit(fmt, command, "witness", False, lines, started, witness=witness_report(out), **fields)
    emit(fmt, command, "no counterexample", True, [str(out)], started, witness=None, **fields)


@main.command("distinguish")
@click.option("--m1", required=True, help="MODEL@STATE")
@click.option("--m2", required=True, help="MODEL@STATE")
@click.option("--fragment", "fragment_name", required=True, help="EL, ELC, ..., ELCDF")
@click.option("--depth", required=True, type=click.IntRange(min=0))
@click.option("--atoms", help="Atoms to use (default: those true somewhere in either model).")
@format_option
def distinguish_cmd(m1, m2, fragment_name, depth, atoms, fmt):
    """Find a formula true at exactly one of two pointed models."""
    started = time.perf_counter()
    p1, p2 = read_pointed(m1), read_pointed(m2)
    frag = read_fragment(fragment_name)
    pool = _split(atoms)
    if pool is None:
        pool = sorted({x for p in (p1, p2) for s in p.model.states for x in p.model.props(s)})
        pool = pool or ["p"]
    try:
        out = search.distinguish(p1, p2, frag, depth, pool)
    except SearchError as exc:
        raise DataError(str(exc)) from None
    if out.found:
        emit(fmt, "distinguish", "distinguished", False, [f"distinguished by {render(out.formula)}"],
             started, formula=render(out.formula))
    emit(fmt, "distinguish", "indistinguishable", True,
         [f"indistinguishable in {frag.name} up to depth {depth}"], started, formula=None)


@main.command()
@click.option("--system", "system_name", help="Axiom system (default: the script's header).")
@click.option("--script", "script_ref", required=True, help="Proof file or bundled proof name.")
@format_option
def prove(system_name, script_ref, fmt):
    """Check a proof script."""
    started = time.perf_counter()
    path = Path(script_ref)
    if not path.exists():
        bundled = proof.corpus_proofs()
        path = bundled.get(Path(script_ref).stem)
        if path is None:
            raise DataError(f"no such proof script: {script_ref}")
    try:
        script = proof.load_script(path)
        name = system_name or proof.script_system(path)
        if name is None:
            raise DataError("no --system given and the script has no '# system:' header")
        sys_ = proof.system(name)
    except (ProofSyntaxError, ParseError, ValueError, OSError) as exc:
        if isinstance(exc, DataError):
            raise
        raise DataError(f"{script_ref}: {exc}") from None
    verdict = proof.check_proof(script, sys_)
    if verdict.accepted:
        emit(fmt, "prove", "accepted", True,
             [f"accepted in {sys_.name}: {render(script.conclusion)}"], started,
             system=sys_.name, conclusion=render(script.conclusion))
    emit(fmt, "prove", "rejected", False, [str(verdict)],
         started, system=sys_.name, line=verdict.line, reason=verdict.reason)


@main.command("closure")
@click.option("--formula", "formula_text", required=True)
@click.option("--system", "system_name", help="Axiom system (default: smallest containing the formula).")
@format_option
def closure_cmd(formula_text, system_name, fmt):
    """List the closure set of a formula."""
    started = time.perf_counter()
    f = read_formula(formula_text)
    try:
        sys_ = proof.system(system_name or fragment_of(f).name)
        cl = proof.closure(f, sys_)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    items = sorted(render(g) for g in cl)
    emit(fmt, "closure", "ok", True, items + [f"({len(items)} formulas)"], started,
         system=sys_.name, size=len(items), closure=items)


@main.command()
@click.option("--kripke", "kripke_path", required=True, type=click.Path(dir_okay=False))
@click.option("--output", "-o", type=click.Path(dir_okay=False), help="Write the model here.")
@format_option
def translate(kripke_path, output, fmt):
    """Turn a symmetric Kripke model into a similarity model."""
    started = time.perf_counter()
    try:
        n = models.load_kripke(Path(kripke_path).read_bytes())
        m = models.translate_kripke(n)
    except (ModelError, OSError) as exc:
        raise DataError(str(exc)) from None
    data = models.save(m)
    if output:
        Path(output).write_bytes(data)
        lines = [f"wrote {output}"]
    else:
        lines = [data.decode("utf-8").rstrip("\n")]
    emit(fmt, "translate", "ok", True, lines, started, model=models.to_document(m))


@main.command("reproduce-paper")
@click.option("--quick", is_flag=True, help="Skip the bounded validity suite.")
@format_option
def reproduce(quick, fmt):
    """Replay the worked examples, scheme suites and expressivity fixtures."""
    started = time.perf_counter()
    results = reference.check_examples() + reference.check_invalid()
    if not quick:
        results += reference.check_valid()
    results += reference.check_expressivity()
    ok = all(r.passed for r in results)
    width = max(len(f"{r.suite}: {r.name}") for r in results)
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {(r.suite + ': ' + r.name).ljust(width)}  {r.detail}"
             for r in results]
    lines.append(f"{sum(r.passed for r in results)}/{len(results)} passed")
    emit(fmt, "reproduce-paper", "pass" if ok else "fail", ok, lines, started,
         checks=[{"suite": r.suite, "name": r.name, "passed": r.passed, "detail": r.detail}
                 for r in results])


if __name__ == "__main__":
    main()
