"""Strategy combinators as plain rho-terms.

Each builder returns a closed term; bound variables are drawn fresh per
instantiation so nested combinators never share binder names.
"""

from __future__ import annotations

from .terms import (Var, Fun, Set, Rule, App, First, Choice, Dc,
                    Phi, Psi, EMPTY, RULE, SET)
from .subst import Fresh

NAMES = ("Id", "Fail", "Seq", "Try", "First", "Dc", "Phi", "Psi", "Theta",
         "SD", "BottomUp", "TopDown", "OnceBu", "OnceTd", "RepeatStar", "Im",
         "Om", "IMrec")

_fresh = Fresh("_k")


def _v(fresh):
    return Var((fresh or _fresh)())


def make_basic(name, fresh=None):
    x = _v(fresh)
    if name == "Id":
        return Rule(x, x)
    if name == "Fail":
        return Rule(x, EMPTY)
    raise ValueError("unknown basic combinator %r" % name)


def make_id(fresh=None):
    return make_basic("Id", fresh)


def make_fail(fresh=None):
    return make_basic("Fail", fresh)


def make_seq(u, v, fresh=None):
    """u;v, i.e. z -> [v]([u](z))."""
    z = _v(fresh)
    return Rule(z, App(v, App(u, z)))


def make_try(s, fresh=None):
    return First([s, make_id(fresh)])


def make_first(*ss):
    return First(ss)


def make_dc(*ss):
    return Dc(ss)


def make_traverse(kind, r, sig=None, expand=False, fresh=None):
    """Native Phi/Psi node, or its expansion over a finite signature."""
    if not expand:
        return Phi(r) if kind == "Phi" else Psi(r)
    if sig is None or not sig.symbols:
        raise ValueError("traversal expansion needs a non-empty signature")
    if kind == "Phi":
        alts = []
        for f in sig.functions():
            n = sig.arity(f)
            for i in range(n):
                alts.append(Fun(f, [r if j == i else make_id(fresh)
                                    for j in range(n)]))
        return First(alts) if alts else make_fail(fresh)
    elems = [Fun(c, ()) for c in sig.constants()]
    elems += [Fun(f, [r] * sig.arity(f)) for f in sig.functions()]
    return Set(elems)


def make_fixpoint(fresh=None):
    """Turing-style fixed point: [A](A) with A = x -> (y -> [y]([[x](x)](y)))."""
    x, y = _v(fresh), _v(fresh)
    a = Rule(x, Rule(y, App(y, App(App(x, x), y))))
    return App(a, a)


def _trav(kind, r, sig, fresh):
    return make_traverse(kind, r, sig, expand=sig is not None, fresh=fresh)


def _body(kind, r, fresh, sig):
    f, x = _v(fresh), _v(fresh)
    idf = lambda: make_id(fresh)  # noqa: E731
    if kind == "SD":
        inner = Choice([App(make_seq(_trav("Psi", f, sig, fresh), r, fresh), x)])
    elif kind == "SDS":
        inner = App(make_seq(_trav("Psi", f, sig, fresh), r, fresh), x)
    elif kind == "BottomUp":
        inner = App(make_seq(First([_trav("Psi", f, sig, fresh), idf()]),
                             First([r, idf()]), fresh), x)
    elif kind == "TopDown":
        inner = Choice([App(make_seq(First([r, idf()]),
                                     First([_trav("Psi", f, sig, fresh), idf()]),
                                     fresh), x)])
    elif kind == "OnceBu":
        inner = App(First([_trav("Phi", f, sig, fresh), r]), x)
    elif kind == "OnceTd":
        inner = App(First([r, _trav("Phi", f, sig, fresh)]), x)
    elif kind == "RepeatStar":
        inner = App(First([make_seq(r, f, fresh), idf()]), x)
    else:
        raise ValueError("unknown recursor %r" % kind)
    return Rule(f, Rule(x, inner))


def make_generator(kind, r, fresh=None, sig=None):
    """The G/H/J term whose fixed point gives the recursor."""
    return _body(kind, r, fresh, sig)


def make_recursor(kind, r, fresh=None, sig=None):
    return App(make_fixpoint(fresh), _body(kind, r, fresh, sig))


def make_normalizer(kind, rules, fresh=None, sig=None):
    _check_rules(rules)
    once = "OnceBu" if kind == "Im" else "OnceTd"
    return make_recursor("RepeatStar", make_recursor(once, rules, fresh, sig),
                         fresh, sig)


def make_im(rules, fresh=None, sig=None):
    return make_normalizer("Im", rules, fresh, sig)


def make_om(rules, fresh=None, sig=None):
    return make_normalizer("Om", rules, fresh, sig)


def _check_rules(rules):
    elems = rules.elems if rules.tag == SET else (rules,)
    for e in elems:
        if e.tag != RULE:
            raise ValueError("not a rule: %s" % (e,))


def make_IM(conditional, unconditional=(), true_sym="True", fresh=None,
            sig=None):
    """Normalizer for a conditional system.

    `conditional` holds triples (l, r, c); `unconditional` plain rules.
    The recursive call f normalizes each condition before it is tested
    against True.
    """
    if sig is not None and true_sym not in sig:
        raise ValueError("signature lacks the %s constant" % true_sym)
    f, y = _v(fresh), _v(fresh)
    true = Fun(true_sym, ())
    rs = [Rule(l, App(Rule(true, r), App(f, c))) for l, r, c in conditional]
    rs += list(unconditional)
    body = Rule(f, Rule(y, App(make_im(Set(rs), fresh, sig), y)))
    return App(make_fixpoint(fresh), body)


def encode_conditional_rule(l, r, cond, norm_rules, true_sym="True",
                            fresh=None, sig=None):
    """l -> [True -> r]([im(norm_rules)](cond))."""
    if sig is not None and true_sym not in sig:
        raise ValueError("signature lacks the %s constant" % true_sym)
    true = Fun(true_sym, ())
    return Rule(l, App(Rule(true, r), App(make_im(norm_rules, fresh, sig), cond)))
