"""Capture-avoiding substitution, alpha-conversion and grafting.

Rule binders are the free variables of the left-hand side.  Fresh names
come from the reserved namespace ``_v<N>``; the parser refuses user
identifiers starting with ``_``.
"""

from __future__ import annotations

from .terms import (Term, Var, Rule, VAR, RULE, free_vars,
                    all_vars)

RESERVED_PREFIX = "_"


class Fresh:
    """Session-local fresh-name supply."""

    def __init__(self, prefix="_v"):
        self.prefix = prefix
        self.n = 0

    def __call__(self, used=frozenset()):
        while True:
            self.n += 1
            name = "%s%d" % (self.prefix, self.n)
            if name not in used:
                return name


_default_fresh = Fresh()


class Substitution(dict):
    """A finite map variable name -> Term.  Identity bindings are dropped."""

    def __init__(self, items=(), **kw):
        super().__init__()
        for k, v in dict(items, **kw).items():
            if isinstance(k, Var):
                k = k.name
            if not (isinstance(v, Var) and v.name == k):
                self[k] = v

    def dom(self):
        return frozenset(self.keys())

    def ran(self):
        return list(self.values())

    def vran(self):
        out = frozenset()
        for v in self.values():
            out |= free_vars(v)
        return out

    def __repr__(self):
        inner = ", ".join("%s/%s" % (k, v) for k, v in sorted(self.items()))
        return "<" + inner + ">"


ID = Substitution()


def _rename_ctx(ctx, ren):
    if ctx is None:
        return None
    return tuple((ren[n].name if n in ren else n, ty) for n, ty in ctx)


def apply_subst(sigma, t: Term, fresh=None) -> Term:
    """Simultaneous capture-avoiding application of sigma to t."""
    if not sigma:
        return t
    fresh = fresh or _default_fresh
    return _subst(dict(sigma), t, fresh)


def _subst(sigma, t, fresh):
    fv = free_vars(t)
    if not any(k in fv for k in sigma):
        return t
    tag = t.tag
    if tag == VAR:
        return sigma.get(t.name, t)
    if tag == RULE:
        bound = free_vars(t.lhs)
        s2 = {k: v for k, v in sigma.items() if k in fv}
        if not s2:
            return t
        ranfv = frozenset()
        for v in s2.values():
            ranfv |= free_vars(v)
        clash = bound & ranfv
        lhs, rhs, ctx = t.lhs, t.rhs, t.ctx
        if clash:
            used = all_vars(t) | ranfv | frozenset(s2)
            ren = {}
            for b in sorted(clash):
                n = fresh(used)
                used = used | {n}
                ren[b] = Var(n)
            lhs = _subst(ren, lhs, fresh)
            rhs = _subst(ren, rhs, fresh)
            ctx = _rename_ctx(ctx, ren)
        return Rule(lhs, _subst(s2, rhs, fresh), ctx)
    return t.rebuild([_subst(sigma, c, fresh) for c in t.children])


def alpha_rename(t: Term, avoid, fresh=None) -> Term:
    """Rename every rule-bound variable of t that lies in `avoid`."""
    fresh = fresh or _default_fresh
    avoid = frozenset(avoid)
    return _arename(t, avoid, fresh, set(all_vars(t) | avoid))


def _arename(t, avoid, fresh, used):
    if t.tag == VAR:
        return t
    if t.tag == RULE:
        bound = free_vars(t.lhs)
        clash = bound & avoid
        lhs, rhs, ctx = t.lhs, t.rhs, t.ctx
        if clash:
            ren = {}
            for b in sorted(clash):
                n = fresh(used)
                used.add(n)
                ren[b] = Var(n)
            lhs = _subst(ren, lhs, fresh)
            rhs = _subst(ren, rhs, fresh)
            ctx = _rename_ctx(ctx, ren)
        return Rule(_arename(lhs, avoid, fresh, used),
                    _arename(rhs, avoid, fresh, used), ctx)
    return t.rebuild([_arename(c, avoid, fresh, used) for c in t.children])


def graft(sigma, t: Term) -> Term:
    """First-order replacement of every occurrence; no renaming at all."""
    if not sigma:
        return t
    if t.tag == VAR:
        return sigma.get(t.name, t)
    if not t.children:
        return t
    out = t.rebuild([graft(sigma, c) for c in t.children])
    if t.tag == RULE and t.ctx is not None:
        # keep annotations for variables that stayed variables
        keep = tuple((n, ty) for n, ty in t.ctx
                     if not (n in sigma and not isinstance(sigma[n], Var)))
        ren = {n: sigma[n] for n, _ in t.ctx
               if n in sigma and isinstance(sigma[n], Var)}
        out = Rule(out.lhs, out.rhs, _rename_ctx(keep, ren))
    return out


def alpha_canon(t: Term) -> Term:
    """Representative of t's alpha-class.

    Binders are renamed to ``_b<depth>_<i>`` by nesting depth and
    left-to-right first-occurrence order inside the lhs; sets are
    re-canonicalized on the way up, so alpha-equivalent elements merge.
    """
    return _canon(t, {}, 0)


def _lhs_order(t, out, seen):
    if t.tag == VAR:
        if t.name not in seen:
            seen.add(t.name)
            out.append(t.name)
        return
    if t.tag == RULE:
        # only free occurrences of a nested lhs rule count
        for n in sorted(free_vars(t)):
            if n not in seen:
                seen.add(n)
                out.append(n)
        return
    for c in t.children:
        _lhs_order(c, out, seen)


def _canon(t, env, d):
    tag = t.tag
    if tag == VAR:
        return env.get(t.name, t)
    if tag == RULE:
        order = []
        _lhs_order(t.lhs, order, set())
        bound = free_vars(t.lhs)
        names = [n for n in order if n in bound]
        env2 = dict(env)
        for i, n in enumerate(names):
            env2[n] = Var("_b%d_%d" % (d, i))
        ctx = None
        if t.ctx is not None:
            ctx = tuple((env2[n].name if n in env2 and n in bound else n, ty)
                        for n, ty in t.ctx)
        return Rule(_canon(t.lhs, env2, d + 1), _canon(t.rhs, env2, d + 1), ctx)
    if not t.children:
        return t
    return t.rebuild([_canon(c, env, d) for c in t.children])


def alpha_equal(a: Term, b: Term) -> bool:
    return a == b or alpha_canon(a) == alpha_canon(b)
