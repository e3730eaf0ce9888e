"""A rewriting-calculus engine: terms, matching, gated evaluation,
strategy combinators, simple types and an explicit-substitution variant."""

from .terms import (Term, Var, Fun, Set, Rule, App, First, Choice, Dc,
                    UChoice, Phi, Psi, EMPTY, Signature, TOP, free_vars,
                    present_vars, subterm_at, replace_at, is_linear)
from .subst import Substitution, ID, apply_subst, alpha_rename, graft, \
    alpha_equal, alpha_canon
from .matching import match_syntactic, solution, Success, Failure
from .gates import Gate, fire_allowed
from .evaluator import (ReductionConfig, StepInfo, Result, head_redex, step,
                        normalize, reduction_graph)
from .syntax import parse, parse_term, show, ParseError

__version__ = "0.1.0"
