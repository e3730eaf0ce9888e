"""Simple types for the first-order-pattern calculus.

Bidirectional: `infer` synthesizes, `check` verifies against an expected
type.  A bare empty set only checks; synthesizing it is a needs-annotation
error.  Rule binders take their types from the rule's local context, which
shadows the surrounding context.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .stypes import Type, Arrow
from .terms import (Term, Var, Rule, VAR, FUN, SET, RULE, APP,
                    Signature, iter_subterms, free_vars)
from .matching import match_syntactic
from .subst import Fresh, _subst
from . import evaluator as ev

TYPE_CLASH = "TypeClash"


class RhoTypeError(Exception):
    """kind is one of: inconsistent-context, no-profile,
    set-element-type-mismatch, rule-context-mismatch,
    untypable-application, needs-annotation, unbound-variable,
    subject-reduction-violation."""

    def __init__(self, kind, msg):
        super().__init__("%s: %s" % (kind, msg))
        self.kind = kind


# ---------------------------------------------------------------------------
# contexts

def merge_contexts(*ctxs):
    """Union of contexts; raises on a variable with two types."""
    out = {}
    for c in ctxs:
        for n, ty in (c or {}).items():
            if n in out and out[n] != ty:
                raise RhoTypeError("inconsistent-context",
                                   "%s : %s and %s" % (n, out[n], ty))
            out[n] = ty
    return out


def is_consistent(pairs):
    try:
        merge_contexts(*({n: t} for n, t in pairs))
        return True
    except RhoTypeError:
        return False


# ---------------------------------------------------------------------------
# profiles

class Profiles:
    """Overload resolution with the arrow-lifting closure, memoized."""

    def __init__(self, sig: Signature):
        self.sig = sig
        self._args_for = lru_cache(maxsize=None)(self._args_for_impl)
        self._results = lru_cache(maxsize=None)(self._results_impl)

    def base(self, f):
        return self.sig.profiles.get(f, [])

    def args_for(self, f, result):
        """All argument-type tuples giving `result`."""
        return self._args_for(f, result)

    def _args_for_impl(self, f, result):
        out = [a for a, r in self.base(f) if r == result]
        if isinstance(result, Arrow):
            for p in self._args_for(f, result.dom):
                for q in self._args_for(f, result.cod):
                    cand = tuple(Arrow(x, y) for x, y in zip(p, q))
                    if cand not in out:
                        out.append(cand)
        return tuple(out)

    def results(self, f, argtypes):
        return self._results(f, tuple(argtypes))

    def _results_impl(self, f, argtypes):
        out = [r for a, r in self.base(f) if a == argtypes]
        if argtypes and all(isinstance(t, Arrow) for t in argtypes):
            doms = tuple(t.dom for t in argtypes)
            cods = tuple(t.cod for t in argtypes)
            for r1 in self._results(f, doms):
                for r2 in self._results(f, cods):
                    c = Arrow(r1, r2)
                    if c not in out:
                        out.append(c)
        return tuple(out)


# ---------------------------------------------------------------------------
# the checker

class Checker:
    def __init__(self, sig: Signature):
        self.sig = sig
        self.prof = Profiles(sig)

    # -- helpers
    def rule_ctx(self, r: Rule, ctx):
        bound = free_vars(r.lhs)
        local = r.ctx_dict() or {}
        missing = [n for n in bound if n not in local]
        if missing:
            raise RhoTypeError("rule-context-mismatch",
                               "unannotated binder(s) %s in %s"
                               % (", ".join(sorted(missing)), r))
        extra = [n for n in local if n not in bound]
        if extra:
            raise RhoTypeError("rule-context-mismatch",
                               "annotation for non-binder(s) %s" % ", ".join(extra))
        lctx = dict(local)
        inner = dict(ctx)
        inner.update(lctx)
        return lctx, inner

    # -- synthesis
    def infer(self, ctx, t: Term) -> Type:
        tag = t.tag
        if tag == VAR:
            if t.name not in ctx:
                raise RhoTypeError("unbound-variable", t.name)
            return ctx[t.name]
        if tag == FUN:
            return self._infer_fun(ctx, t)
        if tag == SET:
            if not t.elems:
                raise RhoTypeError("needs-annotation", "bare empty set")
            ty = None
            for e in t.elems:
                try:
                    et = self.infer(ctx, e)
                except RhoTypeError as err:
                    if err.kind != "needs-annotation":
                        raise
                    continue
                if ty is None:
                    ty = et
                elif et != ty:
                    raise RhoTypeError("set-element-type-mismatch",
                                       "%s has %s, expected %s" % (e, et, ty))
            if ty is None:
                raise RhoTypeError("needs-annotation", str(t))
            for e in t.elems:
                self.check(ctx, e, ty)
            return ty
        if tag == RULE:
            lctx, inner = self.rule_ctx(t, ctx)
            a = self.infer(lctx, t.lhs)
            b = self.infer(inner, t.rhs)
            return Arrow(a, b)
        if tag == APP:
            u, v = t.fun, t.arg
            if not self._head_is_symbolic(u):
                fu = self.infer(ctx, u)
                if not isinstance(fu, Arrow):
                    raise RhoTypeError("untypable-application",
                                       "%s has non-arrow type %s" % (u, fu))
                self.check(ctx, v, fu.dom)
                return fu.cod
            a = self.infer(ctx, v)
            res = self.fun_results(ctx, u, a)
            if len(res) != 1:
                raise RhoTypeError("untypable-application" if not res else
                                   "needs-annotation",
                                   "%s applied to %s : %s" % (u, v, a))
            return res[0]
        raise RhoTypeError("untypable-application",
                           "no typing rule for %s" % (t,))

    def _head_is_symbolic(self, u):
        if u.tag == FUN:
            return True
        if u.tag == SET:
            return any(self._head_is_symbolic(e) for e in u.elems) or not u.elems
        return False

    def _infer_fun(self, ctx, t):
        if not self.prof.base(t.sym) and t.sym in self.sig.symbols:
            raise RhoTypeError("no-profile", "%s has no type profile" % t.sym)
        argtys = []
        for a in t.args:
            argtys.append(self.infer(ctx, a))
        res = self.prof.results(t.sym, argtys)
        if not res:
            raise RhoTypeError("no-profile", "%s(%s)" % (
                t.sym, ", ".join(map(str, argtys))))
        if len(res) > 1:
            raise RhoTypeError("needs-annotation",
                               "%s is ambiguous (%s)" % (t, ", ".join(map(str, res))))
        return res[0]

    def fun_results(self, ctx, u, dom):
        """Types B with ctx |- u : dom -o B, for symbolic heads."""
        if u.tag == SET:
            res = None
            for e in u.elems:
                r = set(self.fun_results(ctx, e, dom))
                res = r if res is None else res & r
            return sorted(res or (), key=str)
        if u.tag != FUN:
            try:
                fu = self.infer(ctx, u)
            except RhoTypeError:
                return []
            if isinstance(fu, Arrow) and fu.dom == dom:
                return [fu.cod]
            return []
        out = []
        for p in self.prof.args_for(u.sym, dom):
            cods = []
            ok = True
            for arg, pi in zip(u.args, p):
                cs = self.fun_results(ctx, arg, pi)
                if not cs:
                    ok = False
                    break
                cods.append(cs)
            if not ok:
                continue
            for combo in itertools.product(*cods):
                for r in self.prof.results(u.sym, combo):
                    if r not in out:
                        out.append(r)
        return out

    # -- checking
    def check(self, ctx, t: Term, ty: Type):
        tag = t.tag
        if tag == SET:
            for e in t.elems:
                self.check(ctx, e, ty)
            return
        if tag == FUN:
            cands = self.prof.args_for(t.sym, ty)
            if not cands:
                raise RhoTypeError("no-profile", "%s at type %s" % (t.sym, ty))
            last = None
            for p in cands:
                try:
                    for a, pt in zip(t.args, p):
                        self.check(ctx, a, pt)
                    return
                except RhoTypeError as e:
                    last = e
            raise last
        if tag == RULE:
            if not isinstance(ty, Arrow):
                raise RhoTypeError("untypable-application",
                                   "rule %s checked against %s" % (t, ty))
            lctx, inner = self.rule_ctx(t, ctx)
            self.check(lctx, t.lhs, ty.dom)
            self.check(inner, t.rhs, ty.cod)
            return
        if tag == APP:
            u, v = t.fun, t.arg
            try:
                a = self.infer(ctx, v)
            except RhoTypeError as e:
                if e.kind != "needs-annotation":
                    raise
                fu = self.infer(ctx, u)
                if not isinstance(fu, Arrow) or fu.cod != ty:
                    raise RhoTypeError("untypable-application", str(t))
                self.check(ctx, v, fu.dom)
                return
            self.check(ctx, u, Arrow(a, ty))
            return
        got = self.infer(ctx, t)
        if got != ty:
            raise RhoTypeError("untypable-application",
                               "%s has type %s, expected %s" % (t, got, ty))

    def has_type(self, ctx, t, ty):
        try:
            self.check(ctx, t, ty)
            return True
        except RhoTypeError:
            return False


def infer_type(ctx, t, sig, expected=None):
    c = Checker(sig)
    ctx = dict(ctx or {})
    if expected is not None:
        c.check(ctx, t, expected)
        return expected
    return c.infer(ctx, t)


def check_type(ctx, t, ty, sig):
    Checker(sig).check(dict(ctx or {}), t, ty)


# ---------------------------------------------------------------------------
# typed matching

@dataclass(frozen=True)
class TypedFailure:
    reason: str
    ok = False


def match_typed(lctx, l, tctx, t, sig):
    """Syntactic matching plus a type check of every binding."""
    m = match_syntactic(l, t)
    if not m.ok:
        return m
    checker = Checker(sig)
    for x, ty in (lctx or {}).items():
        if x not in free_vars(l):
            continue
        img = m.subst.get(x, Var(x))
        if img.tag == VAR:
            ity = (tctx or {}).get(img.name)
            if ity is None or ity != ty:
                return TypedFailure(TYPE_CLASH)
            continue
        if not checker.has_type(tctx or {}, img, ty):
            return TypedFailure(TYPE_CLASH)
    return m


# ---------------------------------------------------------------------------
# typed evaluation

def rename_apart(t, fresh=None):
    """Give every rule binder a distinct name, keeping contexts aligned."""
    fresh = fresh or Fresh("_t")

    def go(s):
        if s.tag == RULE:
            bound = sorted(free_vars(s.lhs))
            ren = {b: Var(fresh()) for b in bound}
            lhs = _subst(ren, s.lhs, fresh)
            rhs = _subst(ren, s.rhs, fresh)
            ctx = None
            if s.ctx is not None:
                ctx = tuple((ren[n].name if n in ren else n, ty) for n, ty in s.ctx)
            return Rule(go(lhs), go(rhs), ctx)
        if not s.children:
            return s
        return s.rebuild([go(c) for c in s.children])
    return go(t)


def term_env(t, base=None):
    env = dict(base or {})
    for s, _ in iter_subterms(t):
        if s.tag == RULE and s.ctx:
            for n, ty in s.ctx:
                env.setdefault(n, ty)
    return env


@dataclass
class TypedResult:
    kind: str
    term: Term
    type: Type
    steps: int
    trace: Optional[list] = None


def typed_config(sig, ctx, state, gate="none", **kw):
    def matcher(r, arg):
        lctx = r.ctx_dict() or {}
        m = match_typed(lctx, r.lhs, state["env"], arg, sig)
        return [m.subst] if m.ok else []
    return ev.ReductionConfig(gate=gate, matcher=matcher, **kw)


def typed_step(ctx, t, sig, gate="none"):
    state = {"env": term_env(t, ctx)}
    cfg = typed_config(sig, ctx, state, gate)
    return ev.step(t, cfg)


def typed_normalize(ctx, t, sig, gate="none", max_steps=None, trace=False,
                    check_each=True, prepared=False):
    """Normalize a well-typed term; every step is re-checked at the
    original type when check_each is set."""
    ctx = dict(ctx or {})
    checker = Checker(sig)
    ty = checker.infer(ctx, t)
    if not prepared:
        t = rename_apart(t)
    state = {"env": term_env(t, ctx)}
    cfg = typed_config(sig, ctx, state, gate, trace=trace)
    if max_steps is not None:
        cfg.max_steps = max_steps
    tr = [] if trace else None
    n = 0
    while True:
        state["env"] = term_env(t, ctx)
        r = ev.step(t, cfg)
        if r is None:
            return TypedResult("NormalForm", t, ty, n, tr)
        if n >= cfg.max_steps:
            return TypedResult("StepLimit", t, ty, n, tr)
        t2, info = r
        n += 1
        if check_each and not checker.has_type(ctx, t2, ty):
            raise RhoTypeError("subject-reduction-violation",
                               "%s step %s -> %s loses type %s"
                               % (info.rule_name, t, t2, ty))
        if tr is not None:
            tr.append(info)
        t = t2
