import json

import pytest
from click.testing import CliRunner

from simlogic import models
from simlogic.cli import BOUNDS_ENV, main


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args, env=None):
        return runner.invoke(main, list(args), env=env, catch_exceptions=False)

    return invoke


def report(result):
    data = json.loads(result.output)
    data.pop("seconds")
    return data


# --- check ---------------------------------------------------------------------

def test_check_true(run):
    r = run("check", "--model", "example1.model", "--state", "s1",
            "--formula", "D {a,b} (p & ~q & r)")
    assert r.exit_code == 0
    assert "true at s1" in r.output


def test_check_false_with_pointed_syntax(run):
    r = run("check", "--model", "example1@s1", "--formula", "K a q")
    assert r.exit_code == 1


def test_check_model_file_path(run, tmp_path):
    path = tmp_path / "m.model"
    path.write_bytes(models.save(models.corpus_model("example2")))
    r = run("check", "--model", f"{path}@s2", "--formula", "C {a,b} p", "--format", "json")
    assert r.exit_code == 0
    assert report(r) == {"version": 1, "command": "check", "verdict": "true",
                         "formula": "C {a,b} p", "state": "s2"}


def test_check_validity_in_model(run):
    assert run("check", "--model", "example2", "--formula", "C {a,b} p -> D {a,b} p").exit_code == 0
    r = run("check", "--model", "example2", "--formula", "C {a,b} p -> F {a,b} p",
            "--format", "json")
    assert r.exit_code == 1
    assert "s2" not in report(r)["extension"]


def test_formula_from_file(run, tmp_path):
    f = tmp_path / "f.txt"
    f.write_text("# comment\nK a ~q\n", encoding="utf-8")
    assert run("check", "--model", "example1@s1", "--formula", f"@{f}").exit_code == 0
    f.write_text("p\nq\n", encoding="utf-8")
    assert run("check", "--model", "example1@s1", "--formula", f"@{f}").exit_code == 2


@pytest.mark.parametrize("args", [
    ("check", "--model", "missing.model", "--state", "s1", "--formula", "p"),
    ("check", "--model", "example1@s1", "--formula", "p &"),
    ("check", "--model", "example1@s9", "--formula", "p"),
    ("check", "--model", "example1@s1", "--formula", "K z p"),
    ("check", "--model", "example1@s1", "--state", "s2", "--formula", "p"),
    ("check", "--model", "example1@s1", "--formula", "@/nonexistent/formula"),
    ("check", "--model", "example1@s1"),
    ("frobnicate",),
    ("distinguish", "--m1", "example1@s1", "--m2", "example1@s2", "--fragment", "XYZ",
     "--depth", "1"),
])
def test_usage_and_data_errors_exit_2(run, args):
    assert run(*args).exit_code == 2


def test_bad_model_file(run, tmp_path):
    path = tmp_path / "bad.model"
    path.write_text('{"states": []}', encoding="utf-8")
    r = run("check", "--model", f"{path}@s", "--formula", "p")
    assert r.exit_code == 2 and "schema" in r.output


# --- validate ------------------------------------------------------------------

def test_validate(run, tmp_path):
    assert run("validate", "--model", "example1").exit_code == 0
    doc = models.to_document(models.corpus_model("example1"))
    doc["edges"][1]["labels"] = ["alpha", "beta", "gamma"]
    path = tmp_path / "bad.model"
    path.write_text(json.dumps(doc), encoding="utf-8")
    r = run("validate", "--model", str(path), "--format", "json")
    assert r.exit_code == 1
    assert [v["kind"] for v in report(r)["violations"]] == ["positivity"]


def test_validate_adjacency_dump(run):
    r = run("validate", "--model", "example2", "--adjacency")
    assert "s2 -- s3: {lambda, pi}" in r.output


# --- search and scheme ------------------------------------------------------------

def test_search_witness(run):
    r = run("search", "--formula", "C {a,b} p -> F {a,b} p", "--format", "json")
    assert r.exit_code == 1
    data = report(r)
    assert data["verdict"] == "witness"
    m = models.load(json.dumps(data["witness"]["model"]))
    from simlogic.semantics import satisfies
    from simlogic.syntax import parse
    assert not satisfies(m, data["witness"]["state"], parse("C {a,b} p -> F {a,b} p"))


def test_search_no_counterexample(run):
    r = run("search", "--formula", "D {a} p <-> K a p")
    assert r.exit_code == 0 and "no counterexample" in r.output


def test_search_bounds_flags(run):
    args = ("search", "--formula", "K a p -> K b p", "--max-states", "2", "--abilities", "x",
            "--cap", "a=x", "--cap", "b=x", "--atoms", "p")
    assert run(*args).exit_code == 0
    assert run(*args, "--vary-capabilities").exit_code == 1


def test_bounds_file_from_environment(run, tmp_path):
    path = tmp_path / "bounds.json"
    path.write_text(json.dumps({"max_states": 2, "ability_pool": ["x"],
                                "agent_capabilities": {"a": ["x"], "b": ["x"]},
                                "atom_pool": ["p"]}), encoding="utf-8")
    r = run("search", "--formula", "K a p -> K b p", env={BOUNDS_ENV: str(path)})
    assert r.exit_code == 0
    assert run("search", "--formula", "K a p -> K b p").exit_code == 1


@pytest.mark.parametrize("doc", [{"states": 2}, {"agent_capabilities": ["x"]},
                                 {"max_states": "2"}, [1, 2]])
def test_malformed_bounds_file(run, tmp_path, doc):
    path = tmp_path / "bounds.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    assert run("search", "--formula", "p", "--bounds", str(path)).exit_code == 2


def test_search_uncovered_atom(run):
    assert run("search", "--formula", "K a r").exit_code == 2


def test_scheme(run):
    assert run("scheme", "--formula", "K a ($phi -> $psi) -> K a $phi -> K a $psi").exit_code == 0
    assert run("scheme", "--formula", "D {a,b} $phi -> D {a} $phi").exit_code == 1


def test_reports_are_deterministic(run):
    args = ("search", "--formula", "E {a,b} p -> C {a,b} p", "--format", "json")
    assert report(run(*args)) == report(run(*args))


# --- distinguish ---------------------------------------------------------------

def test_distinguish_indistinguishable(run):
    r = run("distinguish", "--m1", "appendix-exp2-2-M.model@u1",
            "--m2", "appendix-exp2-2-M_prime.model@u_prime", "--fragment", "ELCF", "--depth", "2")
    assert r.exit_code == 0


def test_distinguish_found(run):
    r = run("distinguish", "--m1", "appendix-exp2-3-M@u1", "--m2", "appendix-exp2-3-M_prime@u_prime",
            "--fragment", "ELF", "--depth", "1", "--format", "json")
    assert r.exit_code == 1
    assert report(r)["formula"] == "F {a,b} p"


# --- prove and closure ------------------------------------------------------------

def test_prove_bundled(run):
    assert run("prove", "--system", "ELD", "--script", "d_necessitation.proof").exit_code == 0
    assert run("prove", "--script", "c2_usage").exit_code == 0


def test_prove_rejected(run, tmp_path):
    path = tmp_path / "bad.proof"
    path.write_text("1. p | ~p ; Premise\n2. K a (p | ~p) ; NecK a 1\n", encoding="utf-8")
    r = run("prove", "--system", "EL", "--script", str(path), "--format", "json")
    assert r.exit_code == 1
    assert report(r)["line"] == 2


def test_prove_errors(run, tmp_path):
    path = tmp_path / "bad.proof"
    path.write_text("1. p ; Lemma\n", encoding="utf-8")
    assert run("prove", "--system", "EL", "--script", str(path)).exit_code == 2
    assert run("prove", "--system", "ELZ", "--script", "d_necessitation").exit_code == 2
    assert run("prove", "--script", "nonexistent").exit_code == 2
    path.write_text("1. p | ~p ; PL\n", encoding="utf-8")
    assert run("prove", "--script", str(path)).exit_code == 2  # no system given


def test_closure(run):
    r = run("closure", "--formula", "K a p", "--system", "ELDF", "--format", "json")
    assert r.exit_code == 0
    assert report(r)["size"] == 8


# --- translate -----------------------------------------------------------------

def test_translate(run, tmp_path):
    src = tmp_path / "n.kripke"
    src.write_bytes(models.save_kripke(models.KripkeModel.create(
        ["s", "t"], {"a": {("s", "t"), ("t", "s")}}, {"p": {"s"}})))
    out = tmp_path / "n.model"
    assert run("translate", "--kripke", str(src), "-o", str(out)).exit_code == 0
    m = models.load_file(out)
    assert m.abilities == {"a", "b_fresh"} and m.edge("s", "t") == {"a"}


def test_translate_rejects_asymmetric(run, tmp_path):
    src = tmp_path / "n.kripke"
    src.write_bytes(models.save_kripke(models.KripkeModel.create(
        ["s", "t"], {"a": {("s", "t")}}, {})))
    assert run("translate", "--kripke", str(src)).exit_code == 2


# --- reproduce-paper -------------------------------------------------------------

def test_reproduce_quick(run):
    r = run("reproduce-paper", "--quick")
    assert r.exit_code == 0
    assert "FAIL" not in r.output
    assert r.output.count("PASS") == 20
