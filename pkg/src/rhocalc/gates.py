"""Structural predicates and the Fire-gating strategies.

The gates are decidable over-approximations of "the argument cannot be
reduced to the empty set or to a multi-element set".  Sets that sit
inside first/dc/choice operators are treated as guarded for the
multi-element clauses: no set rule can move them out of the operator.
"""

from __future__ import annotations

import enum
from functools import lru_cache

from .terms import (Term, Rule, VAR, FUN, SET, RULE, APP,
                    OPERATOR_TAGS, TOP, free_vars, present_vars, is_linear,
                    is_first_order, is_ground_first_order, iter_subterms)
from .matching import matches, MalformedPattern


class Gate(enum.Enum):
    NONE = "none"
    STRICT = "strict"
    CONFSTRAT = "confstrat"
    CONFSTRATLIN = "confstratlin"
    CONFSTRATSTABLE = "confstratstable"
    # not a confluence strategy: variable patterns fire at once (call by
    # name), other patterns wait as under ConfStratLin, with quasi-regularity
    # tested on the fired rule only.  Used for recursive normalizers built
    # from rules that drop variables.
    LAZY = "lazy"
    FIRSTORDER = "firstorder"

    @classmethod
    def parse(cls, s):
        if isinstance(s, cls):
            return s
        return cls(s.lower())


# ---------------------------------------------------------------------------
# subsumption

def weakly_subsumes(l: Term, t: Term) -> bool:
    """Every functional position of l that exists in t is functional in t."""
    def walk(p, s):
        if p.tag != FUN:
            return True
        if s.tag != FUN:
            return False
        # positions of l below a functional node exist in t only if t has
        # that many children
        for i, a in enumerate(p.args):
            if i < len(s.args) and not walk(a, s.args[i]):
                return False
        return True
    return walk(l, t)


def is_prefilterable(l: Term, t: Term) -> bool:
    if not is_first_order(l):
        raise MalformedPattern("pattern is not first-order: %s" % (l,))
    if is_ground_first_order(t):
        return True
    return is_linear(l) and weakly_subsumes(l, t)


def _safe(t: Term) -> bool:
    tag = t.tag
    if tag == SET and len(t.elems) != 1:
        return False
    if tag == APP:
        f = t.fun
        if f.tag != RULE:
            return False
        if not is_first_order(f.lhs) or not matches(f.lhs, t.arg):
            return False
    return all(_safe(c) for c in t.children)


def is_safe(t: Term) -> bool:
    return _safe(t)


def is_calculable(l: Term, t: Term) -> bool:
    return is_prefilterable(l, t) and is_safe(t)


# ---------------------------------------------------------------------------
# rule shape predicates

def _rules_in(t):
    for s, _ in iter_subterms(t):
        if s.tag == RULE:
            yield s


@lru_cache(maxsize=65536)
def is_quasi_regular(r: Term) -> bool:
    """FV(lhs) is included in PV(rhs), for r and every rule nested in its rhs."""
    if r.tag != RULE:
        return all(is_quasi_regular(s) for s in _rules_in(r))
    pv = present_vars(r.rhs)
    if pv is not TOP and not free_vars(r.lhs) <= pv:
        return False
    return all(is_quasi_regular(s) for s in _rules_in(r.rhs))


def _linear_outside_sets(t, names):
    """Every non-Set subterm of t is linear w.r.t. `names`."""
    def occ(s):
        # occurrences of `names`; a set (or pending choice) counts as the
        # max over its elements, which are alternatives rather than copies
        if s.tag == VAR:
            return {s.name: 1} if s.name in names else {}
        if s.tag == SET or s.tag in OPERATOR_TAGS:
            out = {}
            for e in s.children:
                for k, v in occ(e).items():
                    out[k] = max(out.get(k, 0), v)
            return out
        if s.tag == RULE:
            inner = names - free_vars(s.lhs)
            return occ_restricted(s.rhs, inner)
        out = {}
        for c in s.children:
            for k, v in occ(c).items():
                out[k] = out.get(k, 0) + v
        return out

    def occ_restricted(s, nm):
        nonlocal names
        saved = names
        names = nm
        try:
            return occ(s)
        finally:
            names = saved

    return all(v <= 1 for v in occ(t).values())


@lru_cache(maxsize=65536)
def is_strictly_right_linear(r: Term) -> bool:
    if r.tag != RULE:
        return all(is_strictly_right_linear(s) for s in _rules_in(r))
    if not _linear_outside_sets(r.rhs, frozenset(free_vars(r.lhs))):
        return False
    return all(is_strictly_right_linear(s) for s in _rules_in(r.rhs))


@lru_cache(maxsize=65536)
def is_stable(r: Term) -> bool:
    if r.tag != RULE:
        return all(is_stable(s) for s in _rules_in(r))
    fr = free_vars(r.rhs)
    left = fr & free_vars(r.lhs)
    pvl = present_vars(r.lhs)
    right = fr if pvl is TOP else fr & pvl
    if left != right:
        return False
    return all(is_stable(s) for s in _rules_in(r.rhs)) and \
        all(is_stable(s) for s in _rules_in(r.lhs))


# ---------------------------------------------------------------------------
# argument scans

def has_multi_set(t: Term, guarded=True) -> bool:
    """Does t contain a set with more than one element?

    With guarded=True, sets nested inside first/dc/choice operators are
    skipped.
    """
    if t.tag == SET and len(t.elems) > 1:
        return True
    if guarded and t.tag in OPERATOR_TAGS:
        return False
    return any(has_multi_set(c, guarded) for c in t.children)


def has_empty_set(t: Term) -> bool:
    if t.tag == SET and not t.elems:
        return True
    return any(has_empty_set(c) for c in t.children)


def has_bad_app(t: Term) -> bool:
    """An application whose function is not a rule."""
    if t.tag == APP and t.fun.tag != RULE:
        return True
    return any(has_bad_app(c) for c in t.children)


def rule_apps_subsume(t: Term) -> bool:
    """Every [u -> w](v) inside t has u matching v."""
    for s, _ in iter_subterms(t):
        if s.tag == APP and s.fun.tag == RULE:
            lhs = s.fun.lhs
            if not is_first_order(lhs) or not matches(lhs, s.arg):
                return False
    return True


# ---------------------------------------------------------------------------
# the gates

def is_quasi_regular_top(r: Term) -> bool:
    pv = present_vars(r.rhs)
    return pv is TOP or free_vars(r.lhs) <= pv


def conf_strat_lin(l, r, t, hereditary=True) -> bool:
    if is_ground_first_order(t):
        return True
    if not is_first_order(l):
        return False
    if not (is_linear(l) and weakly_subsumes(l, t)):
        return False
    rl = Rule(l, r)
    qr = is_quasi_regular(rl) if hereditary else is_quasi_regular_top(rl)
    if not qr:
        if has_empty_set(t) or has_bad_app(t) or not rule_apps_subsume(t):
            return False
    if not is_strictly_right_linear(rl):
        if has_multi_set(t):
            return False
    return True


def fire_allowed(gate, l: Term, r: Term, t: Term) -> bool:
    gate = Gate.parse(gate)
    if gate is Gate.NONE:
        return True
    if gate is Gate.STRICT:
        return is_ground_first_order(t)
    if gate is Gate.FIRSTORDER:
        return is_first_order(l) and is_first_order(r) and is_ground_first_order(t)
    if gate is Gate.CONFSTRAT:
        if is_ground_first_order(t):
            return True
        if not is_first_order(l):
            return False
        return is_calculable(l, t)
    if gate is Gate.CONFSTRATLIN:
        return conf_strat_lin(l, r, t)
    if gate is Gate.LAZY:
        if l.tag == VAR:
            return True
        return conf_strat_lin(l, r, t, hereditary=False)
    if gate is Gate.CONFSTRATSTABLE:
        return conf_strat_lin(l, r, t) and is_stable(r)
    raise ValueError(gate)
