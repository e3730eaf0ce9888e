"""Lambda terms, rewriting derivations and conditional rules as rho-terms."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

from .terms import (Term, Var, Fun, Set, Rule, App, VAR, FUN, SET, RULE, APP,
                    subterm_at, replace_at, is_first_order)
from .matching import match_syntactic, Success
from .subst import apply_subst, Fresh
from .combinators import encode_conditional_rule as _cond_rule, make_IM


class FragmentError(ValueError):
    """The term lies outside the lambda fragment."""


class IllFormedDerivation(ValueError):
    pass


class MissingTrue(ValueError):
    pass


# ---------------------------------------------------------------------------
# lambda terms

@dataclass(frozen=True)
class LVar:
    name: str


@dataclass(frozen=True)
class LConst:
    sym: str


@dataclass(frozen=True)
class Abs:
    var: str
    body: object


@dataclass(frozen=True)
class LApp:
    fun: object
    arg: object


@dataclass(frozen=True)
class LFun:
    sym: str
    args: Tuple = ()


def lam(*names_and_body):
    *names, body = names_and_body
    for n in reversed(names):
        body = Abs(n, body)
    return body


def lapp(f, *args):
    for a in args:
        f = LApp(f, a)
    return f


def show_lambda(t) -> str:
    if isinstance(t, LVar):
        return t.name
    if isinstance(t, LConst):
        return t.sym
    if isinstance(t, Abs):
        return "\\%s.%s" % (t.var, show_lambda(t.body))
    if isinstance(t, LApp):
        f = show_lambda(t.fun)
        if isinstance(t.fun, Abs):
            f = "(" + f + ")"
        a = show_lambda(t.arg)
        if isinstance(t.arg, (Abs, LApp)):
            a = "(" + a + ")"
        return f + " " + a
    return "%s(%s)" % (t.sym, ", ".join(show_lambda(a) for a in t.args))


def lambda_to_rho(t) -> Term:
    """phi: abstraction becomes a variable-lhs rule."""
    if isinstance(t, LVar):
        return Var(t.name)
    if isinstance(t, LConst):
        return Fun(t.sym, ())
    if isinstance(t, Abs):
        return Rule(Var(t.var), lambda_to_rho(t.body))
    if isinstance(t, LApp):
        return App(lambda_to_rho(t.fun), lambda_to_rho(t.arg))
    if isinstance(t, LFun):
        return Fun(t.sym, [lambda_to_rho(a) for a in t.args])
    raise TypeError("not a lambda term: %r" % (t,))


def rho_to_lambda(t: Term):
    """delta: erases singleton braces; refuses anything else."""
    tag = t.tag
    if tag == VAR:
        return LVar(t.name)
    if tag == SET:
        if len(t.elems) != 1:
            raise FragmentError("set of %d elements" % len(t.elems))
        return rho_to_lambda(t.elems[0])
    if tag == RULE:
        if t.lhs.tag != VAR:
            raise FragmentError("rule with non-variable lhs")
        return Abs(t.lhs.name, rho_to_lambda(t.rhs))
    if tag == APP:
        return LApp(rho_to_lambda(t.fun), rho_to_lambda(t.arg))
    if tag == FUN:
        if not t.args:
            return LConst(t.sym)
        return LFun(t.sym, tuple(rho_to_lambda(a) for a in t.args))
    raise FragmentError("operator node outside the lambda fragment")


def lambda_free_vars(t):
    if isinstance(t, LVar):
        return {t.name}
    if isinstance(t, Abs):
        return lambda_free_vars(t.body) - {t.var}
    if isinstance(t, LApp):
        return lambda_free_vars(t.fun) | lambda_free_vars(t.arg)
    if isinstance(t, LFun):
        out = set()
        for a in t.args:
            out |= lambda_free_vars(a)
        return out
    return set()


def lambda_key(t, env=()):
    """Nameless key: two terms are alpha-equivalent iff their keys agree."""
    if isinstance(t, LVar):
        for i, n in enumerate(env):
            if n == t.name:
                return ("b", i)
        return ("v", t.name)
    if isinstance(t, LConst):
        return ("c", t.sym)
    if isinstance(t, Abs):
        return ("l", lambda_key(t.body, (t.var,) + env))
    if isinstance(t, LApp):
        return ("a", lambda_key(t.fun, env), lambda_key(t.arg, env))
    return ("f", t.sym, tuple(lambda_key(a, env) for a in t.args))


def lambda_alpha_equal(a, b):
    return lambda_key(a) == lambda_key(b)


# beta reduction, kept apart from the rho machinery so it can serve as oracle

_lfresh = Fresh("_l")


def lambda_subst(t, x, u):
    if isinstance(t, LVar):
        return u if t.name == x else t
    if isinstance(t, LConst):
        return t
    if isinstance(t, LApp):
        return LApp(lambda_subst(t.fun, x, u), lambda_subst(t.arg, x, u))
    if isinstance(t, LFun):
        return LFun(t.sym, tuple(lambda_subst(a, x, u) for a in t.args))
    if t.var == x:
        return t
    if t.var in lambda_free_vars(u):
        y = _lfresh()
        body = lambda_subst(t.body, t.var, LVar(y))
        return Abs(y, lambda_subst(body, x, u))
    return Abs(t.var, lambda_subst(t.body, x, u))


def beta_step(t):
    """Leftmost-outermost beta step, or None at normal form."""
    if isinstance(t, LApp):
        if isinstance(t.fun, Abs):
            return lambda_subst(t.fun.body, t.fun.var, t.arg)
        r = beta_step(t.fun)
        if r is not None:
            return LApp(r, t.arg)
        r = beta_step(t.arg)
        return None if r is None else LApp(t.fun, r)
    if isinstance(t, Abs):
        r = beta_step(t.body)
        return None if r is None else Abs(t.var, r)
    if isinstance(t, LFun):
        for i, a in enumerate(t.args):
            r = beta_step(a)
            if r is not None:
                return LFun(t.sym, t.args[:i] + (r,) + t.args[i + 1:])
    return None


def beta_normalize(t, max_steps=50):
    """(normal form, steps), or None when the budget runs out."""
    for n in range(max_steps + 1):
        r = beta_step(t)
        if r is None:
            return t, n
        t = r
    return None


# ---------------------------------------------------------------------------
# rewriting derivations

@dataclass
class Derivation:
    start: Term
    steps: list  # (rule, position) pairs

    def terms(self):
        """The running terms t0 ... tn."""
        out = [self.start]
        t = self.start
        for i, (rule, pos) in enumerate(self.steps):
            t = rewrite_at(t, rule, pos, i)
            out.append(t)
        return out

    def final(self):
        return self.terms()[-1]


def rewrite_at(t, rule, pos, i=0):
    if rule.tag != RULE or not is_first_order(rule.lhs) \
            or not is_first_order(rule.rhs):
        raise IllFormedDerivation("step %d: not a first-order rule" % i)
    try:
        sub = subterm_at(t, pos)
    except Exception:
        raise IllFormedDerivation("step %d: no position %r" % (i, pos))
    m = match_syntactic(rule.lhs, sub)
    if not isinstance(m, Success):
        raise IllFormedDerivation("step %d: lhs does not match" % i)
    return replace_at(t, pos, apply_subst(m.subst, rule.rhs))


def derivation_to_rho(d: Derivation, fire_only=False) -> Term:
    """[un](...[u1](t0)...); ui plants the rule at the step's position.

    With fire_only the context is lifted into the rule instead, giving
    t[l] -> t[r] applied at the top.
    """
    terms = d.terms()
    out = d.start
    for i, (rule, pos) in enumerate(d.steps):
        ctx = terms[i]
        if fire_only:
            u = Rule(replace_at(ctx, pos, rule.lhs),
                     replace_at(ctx, pos, rule.rhs))
        else:
            u = replace_at(ctx, pos, rule)
        out = App(u, out)
    return out


# ---------------------------------------------------------------------------
# conditional rewriting

def _need_true(sig, true_sym):
    if sig is not None and true_sym not in sig.symbols:
        raise MissingTrue("signature lacks the %s constant" % true_sym)


def encode_conditional_rule(l, r, cond, norm_rules, true_sym="True", sig=None,
                            fresh=None):
    """l -> [True -> r]([im(norm_rules)](cond))."""
    _need_true(sig, true_sym)
    for x in (l, r, cond):
        if not is_first_order(x):
            raise ValueError("conditional rules are first-order")
    return _cond_rule(l, r, cond, norm_rules, true_sym=true_sym, fresh=fresh)


def encode_conditional_system(conditional, unconditional=(), true_sym="True",
                              sig=None, fresh=None):
    """The recursive normalizer for a conditional system, as a closed term."""
    _need_true(sig, true_sym)
    return make_IM(list(conditional), list(unconditional), true_sym=true_sym,
                   fresh=fresh)


def strip_braces(t: Term) -> Term:
    """Remove every singleton set wrapper."""
    if t.tag == SET and len(t.elems) == 1:
        return strip_braces(t.elems[0])
    if t.tag == VAR:
        return t
    if t.tag == FUN:
        return Fun(t.sym, [strip_braces(a) for a in t.args])
    if t.tag == SET:
        return Set([strip_braces(e) for e in t.elems])
    if t.tag == RULE:
        return Rule(strip_braces(t.lhs), strip_braces(t.rhs), t.ctx)
    if t.tag == APP:
        return App(strip_braces(t.fun), strip_braces(t.arg))
    return t
