"""Syntactic first-order matching.

The rule system (Decomposition and the three clash rules) is run on a
worklist of equations.  Subject-side equality in the merging check is
taken modulo alpha-conversion, since subjects may contain rules.
"""

from __future__ import annotations

from dataclasses import dataclass

from .terms import Term, VAR, FUN, is_first_order
from .subst import Substitution, ID, alpha_equal

SYMBOL_CLASH = "SymbolClash"
MERGING_CLASH = "MergingClash"
SYMBOL_VARIABLE_CLASH = "SymbolVariableClash"


class MalformedPattern(ValueError):
    pass


@dataclass(frozen=True)
class Success:
    subst: Substitution
    ok = True


@dataclass(frozen=True)
class Failure:
    reason: str
    ok = False


def match_syntactic(l: Term, t: Term, order=None):
    """Match pattern l against subject t.

    `order` optionally permutes the processing of decomposed equations
    (used by tests to show order independence).
    """
    if not is_first_order(l):
        raise MalformedPattern("pattern is not first-order: %s" % (l,))
    work = [(l, t)]
    binding = {}
    first_fail = None
    while work:
        if order is not None and len(work) > 1:
            work = order(work)
        p, s = work.pop(0)
        if p.tag == VAR:
            prev = binding.get(p.name)
            if prev is None:
                binding[p.name] = s
            elif not alpha_equal(prev, s):
                first_fail = first_fail or MERGING_CLASH
                break
            continue
        # p is Fun
        if s.tag == VAR:
            first_fail = first_fail or SYMBOL_VARIABLE_CLASH
            break
        if s.tag != FUN or s.sym != p.sym or len(s.args) != len(p.args):
            first_fail = first_fail or SYMBOL_CLASH
            break
        work = list(zip(p.args, s.args)) + work
    if first_fail:
        return Failure(first_fail)
    return Success(Substitution(binding))


def solution(l: Term, t: Term):
    """The list of matching substitutions: [], [sigma] or [ID]."""
    m = match_syntactic(l, t)
    if not m.ok:
        return []
    return [m.subst if m.subst else ID]


def matches(l: Term, t: Term) -> bool:
    return match_syntactic(l, t).ok
