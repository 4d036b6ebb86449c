"""Epistemic logic over similarity models.

Agents know what holds at every state they cannot tell apart given their
epistemic abilities.  The package parses and evaluates formulas with
individual, mutual, common, distributed and field knowledge, searches bounded
model spaces for countermodels, and checks Hilbert-style proofs.
"""

from .models import (KripkeModel, ModelError, PointedModel, SimilarityModel, Violation,
                     corpus_model, group_abilities, load, load_file, save, translate_kripke,
                     validate)
from .proof import (AxiomSystem, ProofScript, Verdict, check_proof, closure, match_axiom,
                    parse_script, system)
from .search import (DEFAULT_BOUNDS, NoCounterexample, SearchBounds, Witness, check_scheme,
                     distinguish, enumerate_models, find_countermodel)
from .semantics import extension, kripke_extension, reachable, satisfies, valid_in
from .syntax import Formula, Fragment, ParseError, fragment_of, parse, render

__version__ = "0.1.0"

__all__ = [
    "AxiomSystem", "DEFAULT_BOUNDS", "Formula", "Fragment", "KripkeModel", "ModelError",
    "NoCounterexample", "ParseError", "PointedModel", "ProofScript", "SearchBounds",
    "SimilarityModel", "Verdict", "Violation", "Witness", "check_proof", "check_scheme",
    "closure", "corpus_model", "distinguish", "enumerate_models", "extension",
    "find_countermodel", "fragment_of", "group_abilities", "kripke_extension", "load",
    "load_file", "match_axiom", "parse", "parse_script", "reachable", "render", "satisfies",
    "save", "system", "translate_kripke", "valid_in", "validate",
]
