"""Small-step evaluation.

`step` applies one evaluation rule at the redex picked by the fixed
traversal: at an application the head rules are tried first, then the
argument, then the function; everywhere else leftmost-outermost.  Rule
left-hand sides are patterns and are never reduced.

`reduction_graph` ignores that order and expands every redex, which makes
it usable as a confluence oracle.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .terms import (Term, Set, Rule, App, Fun, Choice, UChoice, EMPTY,
                    FUN, SET, RULE, APP, FIRST, CHOICE, DC, UCHOICE, PHI,
                    PSI, free_vars, is_first_order, replace_at,
                    format_position)
from .subst import Fresh, apply_subst, alpha_canon
from .matching import solution
from .gates import Gate, fire_allowed

CORE = "core"
CORE_FIRST = "core+first"
ALL_RULES = "core+first+traverse"

FIRST_RULES = {"First", "First_fail", "First_success", "First_single",
               "DC", "DC_fail", "DC_success", "DC_single"}
TRAVERSE_RULES = {"Traverse_seq", "Traverse_par"}


def default_max_steps():
    try:
        return int(os.environ.get("RHO_MAX_STEPS", "10000"))
    except ValueError:
        return 10000


@dataclass
class ReductionConfig:
    gate: Gate = Gate.CONFSTRAT
    max_steps: int = field(default_factory=default_max_steps)
    trace: bool = False
    rule_set: str = ALL_RULES
    # count gate-blocked Fire redexes as radicals in First_success/DC_success
    strict_radical: bool = False
    fresh: Optional[Fresh] = None
    # hook returning the list of matching substitutions for Fire; the typed
    # evaluator swaps in typed matching here
    matcher: Optional[object] = None
    # optional hook deciding Fire permission (defaults to the gate)
    fire_check: Optional[object] = None
    # reduce the function part of an application before its argument;
    # this is normal order on lambda-style terms
    fun_first: bool = False

    def __post_init__(self):
        self.gate = Gate.parse(self.gate)
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.fresh is None:
            self.fresh = Fresh()

    def enabled(self, name):
        if name in FIRST_RULES:
            return self.rule_set != CORE
        if name in TRAVERSE_RULES:
            return self.rule_set == ALL_RULES
        return True

    def allows_fire(self, r, arg):
        if self.fire_check is not None:
            return self.fire_check(r, arg)
        return fire_allowed(self.gate, r.lhs, r.rhs, arg)

    def match(self, r, arg):
        if self.matcher is not None:
            return self.matcher(r, arg)
        return solution(r.lhs, arg)


@dataclass
class StepInfo:
    rule_name: str
    position: tuple
    before: Term
    after: Term

    def line(self, n):
        return "step %d: %s @ %s : %s ==> %s" % (
            n, self.rule_name, format_position(self.position),
            self.before, self.after)


@dataclass
class Result:
    kind: str          # "NormalForm" or "StepLimit"
    term: Term
    steps: int
    trace: Optional[list] = None

    @property
    def normal(self):
        return self.kind == "NormalForm"


# ---------------------------------------------------------------------------
# head rules

def _fire(t, cfg):
    r = t.fun
    subs = cfg.match(r, t.arg)
    if not subs:
        return EMPTY
    return Set([apply_subst(subs[0], r.rhs, cfg.fresh)])


def head_steps(t: Term, cfg: ReductionConfig, all_=False):
    """Applicable head rules as (name, result) pairs in priority order.

    With all_=False only the first one is computed.  Choice/UChoice
    success rules need the redex-freeness test, done via `has_redex`.
    """
    out = []
    tag = t.tag

    def add(name, thunk):
        if cfg.enabled(name):
            out.append((name, thunk()))
            return not all_
        return False

    if tag == APP:
        f, a = t.fun, t.arg
        if f.tag == SET:
            if add("Distrib", lambda: Set([App(u, a) for u in f.elems])):
                return out
        if a.tag == SET:
            if add("Batch", lambda: Set([App(f, u) for u in a.elems])):
                return out
        ft = f.tag
        if ft == RULE:
            if is_first_order(f.lhs) and cfg.allows_fire(f, a):
                if add("Fire", lambda: _fire(t, cfg)):
                    return out
        elif ft == FUN:
            if a.tag == FUN:
                if a.sym == f.sym and len(a.args) == len(f.args):
                    if add("Congruence", lambda: Set([Fun(f.sym, [
                            App(u, v) for u, v in zip(f.args, a.args)])])):
                        return out
                else:
                    if add("Congruence_fail", lambda: EMPTY):
                        return out
        elif ft == FIRST:
            if add("First", lambda: Choice([App(s, a) for s in f.args])):
                return out
        elif ft == DC:
            if add("DC", lambda: UChoice([App(s, a) for s in f.args])):
                return out
        elif ft == PHI:
            if a.tag == FUN:
                def seq():
                    alts = []
                    for i in range(len(a.args)):
                        args = list(a.args)
                        args[i] = App(f.arg, args[i])
                        alts.append(Set([Fun(a.sym, args)]))
                    return Choice(alts)
                if add("Traverse_seq", seq):
                    return out
        elif ft == PSI:
            if a.tag == FUN:
                if add("Traverse_par", lambda: Set([Fun(a.sym, [
                        App(f.arg, u) for u in a.args])])):
                    return out
        return out

    if tag == RULE:
        if t.lhs.tag == SET:
            if add("Switch_L", lambda: Set([Rule(u, t.rhs, t.ctx)
                                            for u in t.lhs.elems])):
                return out
        if t.rhs.tag == SET:
            if add("Switch_R", lambda: Set([Rule(t.lhs, v, t.ctx)
                                            for v in t.rhs.elems])):
                return out
        return out

    if tag == FUN:
        for i, u in enumerate(t.args):
            if u.tag == SET:
                def lift(i=i, u=u):
                    res = []
                    for e in u.elems:
                        args = list(t.args)
                        args[i] = e
                        res.append(Fun(t.sym, args))
                    return Set(res)
                if add("OpOnSet", lift):
                    return out
        return out

    if tag == SET:
        for u in t.elems:
            if u.tag == SET:
                def flat(u=u):
                    rest = [e for e in t.elems if e is not u]
                    return Set(rest + list(u.elems))
                if add("Flat", flat):
                    return out
        return out

    if tag == CHOICE:
        if not t.args:
            add("First_single", lambda: EMPTY)
            return out
        h = t.args[0]
        if h.tag == SET and not h.elems:
            add("First_fail", lambda: Choice(t.args[1:]))
            return out
        if _committable(h, cfg):
            add("First_success", lambda: Set([h]))
        return out

    if tag == UCHOICE:
        if not t.args:
            add("DC_single", lambda: EMPTY)
            return out
        for i, h in enumerate(t.args):
            if h.tag == SET and not h.elems:
                if add("DC_fail", lambda i=i: UChoice(t.args[:i] + t.args[i + 1:])):
                    return out
        for h in t.args:
            if _committable(h, cfg):
                if add("DC_success", lambda h=h: Set([h])):
                    return out
        return out

    return out


def _committable(h, cfg):
    if free_vars(h):
        return False
    if h.tag == SET and not h.elems:
        return False
    return not has_redex(h, cfg)


def _blocked_fire(t, cfg):
    return (t.tag == APP and t.fun.tag == RULE and is_first_order(t.fun.lhs)
            and not cfg.allows_fire(t.fun, t.arg))


def has_redex(t: Term, cfg: ReductionConfig) -> bool:
    """A redex outside rule bodies (the radical test of the choice rules)."""
    if head_steps(t, cfg):
        return True
    if cfg.strict_radical and _blocked_fire(t, cfg):
        return True
    kids = _child_order(t, weak=True)
    return any(has_redex(t.children[i - 1], cfg) for i in kids)


def head_redex(t: Term, gate=Gate.CONFSTRAT) -> Optional[str]:
    cfg = gate if isinstance(gate, ReductionConfig) else ReductionConfig(gate=gate)
    hs = head_steps(t, cfg)
    return hs[0][0] if hs else None


def _child_order(t, weak=False, fun_first=False):
    tag = t.tag
    if tag == APP:
        return (1, 2) if fun_first else (2, 1)
    if tag == RULE:
        return () if weak else (2,)
    return range(1, len(t.children) + 1)


# ---------------------------------------------------------------------------
# deterministic stepping
#
# The search is weak first: rule bodies are entered only when the rest of
# the term has no redex.  Unapplied recursive strategies sit inside rule
# bodies, and unfolding them there would never stop.

def _find_weak(t, pos, cfg):
    tag = t.tag
    if tag == CHOICE and t.args:
        h = t.args[0]
        if h.tag == SET and not h.elems:
            if cfg.enabled("First_fail"):
                return ("First_fail", pos, Choice(t.args[1:]))
        elif not free_vars(h):
            # First_success needs a redex-free head: look for the head's
            # own redex first, which is exactly what head-first order does
            r = _find_weak(h, pos + (1,), cfg)
            if r is not None:
                return r
            if cfg.enabled("First_success") and not (
                    cfg.strict_radical and has_redex(h, cfg)):
                return ("First_success", pos, Set([h]))
            for i in range(2, len(t.args) + 1):
                r = _find_weak(t.args[i - 1], pos + (i,), cfg)
                if r is not None:
                    return r
            return None
    else:
        hs = head_steps(t, cfg)
        if hs:
            return (hs[0][0], pos, hs[0][1])
    ch = t.children
    for i in _child_order(t, True, cfg.fun_first):
        r = _find_weak(ch[i - 1], pos + (i,), cfg)
        if r is not None:
            return r
    return None


def _find_in_bodies(t, pos, cfg):
    if t.tag == RULE:
        return _find(t.rhs, pos + (2,), cfg)
    ch = t.children
    for i in _child_order(t, True, cfg.fun_first):
        r = _find_in_bodies(ch[i - 1], pos + (i,), cfg)
        if r is not None:
            return r
    return None


def _find(t, pos, cfg):
    r = _find_weak(t, pos, cfg)
    if r is None:
        r = _find_in_bodies(t, pos, cfg)
    return r


def step(t: Term, cfg: Optional[ReductionConfig] = None):
    """One deterministic step: (new_term, StepInfo) or None."""
    cfg = cfg or ReductionConfig()
    r = _find(t, (), cfg)
    if r is None:
        return None
    name, pos, res = r
    after = replace_at(t, pos, res)
    return after, StepInfo(name, pos, t, after)


def normalize(t: Term, cfg: Optional[ReductionConfig] = None) -> Result:
    cfg = cfg or ReductionConfig()
    trace = [] if cfg.trace else None
    n = 0
    while True:
        if n >= cfg.max_steps:
            if step(t, cfg) is None:
                return Result("NormalForm", t, n, trace)
            return Result("StepLimit", t, n, trace)
        r = step(t, cfg)
        if r is None:
            return Result("NormalForm", t, n, trace)
        t, info = r
        n += 1
        if trace is not None:
            trace.append(info)


def evaluate(t, gate=Gate.CONFSTRAT, max_steps=None, **kw) -> Term:
    """Convenience: the normal form (or last term) of t."""
    cfg = ReductionConfig(gate=gate, **kw)
    if max_steps is not None:
        cfg.max_steps = max_steps
    return normalize(t, cfg).term


# ---------------------------------------------------------------------------
# exhaustive exploration

def all_steps(t: Term, cfg: ReductionConfig, pos=()):
    """Every (rule_name, position, result) at every reducible position."""
    out = [(n, pos, r) for n, r in head_steps(t, cfg, all_=True)]
    ch = t.children
    for i in _child_order(t):
        out.extend(all_steps(ch[i - 1], cfg, pos + (i,)))
    return out


def successors(t: Term, cfg: ReductionConfig):
    return [(n, p, replace_at(t, p, r)) for n, p, r in all_steps(t, cfg)]


@dataclass
class ReductionGraph:
    root: Term
    nodes: dict = field(default_factory=dict)      # canon term -> depth
    edges: list = field(default_factory=list)      # (src, dst, label)
    expanded: set = field(default_factory=set)
    truncated: bool = False
    # expanded nodes with at least one reduct, kept even when the reduct
    # itself fell outside the node limit
    reducible: set = field(default_factory=set)
    cut: set = field(default_factory=set)          # reducible, depth-capped

    def normal_forms(self):
        return [n for n in self.nodes
                if n in self.expanded and n not in self.reducible]

    def frontier(self):
        return [n for n in self.nodes if n not in self.expanded or n in self.cut]

    def to_dot(self):
        from .syntax import show
        ids = {n: i for i, n in enumerate(self.nodes)}
        lines = ["digraph rho {"]
        for n, i in ids.items():
            label = show(n).replace("\\", "\\\\").replace('"', '\\"')
            shape = ", shape=box" if n in set(self.normal_forms()) else ""
            lines.append('  n%d [label="%s"%s];' % (i, label, shape))
        for s, d, lab in self.edges:
            lines.append('  n%d -> n%d [label="%s"];' % (ids[s], ids[d], lab))
        lines.append("}")
        return "\n".join(lines) + "\n"


def reduction_graph(t: Term, gate=Gate.CONFSTRAT, node_limit=2000,
                    depth_limit=8, cfg: Optional[ReductionConfig] = None):
    """Breadth-first exploration of all reducts, nodes taken modulo alpha."""
    if cfg is None:
        cfg = ReductionConfig(gate=gate)
    root = alpha_canon(t)
    g = ReductionGraph(root)
    g.nodes[root] = 0
    queue = deque([root])
    seen_edges = set()
    while queue:
        u = queue.popleft()
        d = g.nodes[u]
        if d >= depth_limit:
            # not expanded further, but a leaf here is still a normal form
            if all_steps(u, cfg):
                g.truncated = True
                g.reducible.add(u)
                g.cut.add(u)
            g.expanded.add(u)
            continue
        g.expanded.add(u)
        for name, pos, v in successors(u, cfg):
            g.reducible.add(u)
            v = alpha_canon(v)
            if v not in g.nodes:
                if len(g.nodes) >= node_limit:
                    g.truncated = True
                    continue
                g.nodes[v] = d + 1
                queue.append(v)
            e = (u, v, name)
            if e not in seen_edges:
                seen_edges.add(e)
                g.edges.append(e)
    return g
