"""De Bruijn terms with explicit substitutions.

Nodes are plain tuples tagged by their first field, which keeps them
hashable and totally ordered (sets stay canonical by sorting):

    terms   ('i', n)  ('m', name)  ('f', sym, args)  ('s', elems)
            ('r', lhs, n, rhs)  ('a', u, v)  ('c', t, s)
    substs  ('ID',)  ('SH',)  ('L', s)  ('.', t, s)  ('o', s, t)  ('ms', name)

A rule ('r', lhs, n, rhs) binds indices 1..n in both sides.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .terms import (VAR, FUN, SET, RULE, APP, first_order_vars)
from .gates import Gate

ID = ("ID",)
SH = ("SH",)

SIGMA_RULES = ("lam", "app", "clos", "vs1", "vs2", "fv", "fvl1", "fvl2",
               "rv", "rvl1", "rvl2", "id", "set", "ass", "map", "sc", "sl1",
               "sl2", "l1", "l2", "le", "il", "ir", "li", "op")

TERM_TAGS = frozenset("imfsrac")


class UnboundVariable(ValueError):
    pass


# ---------------------------------------------------------------------------
# constructors

def idx(n):
    return ("i", n)


def mvar(name):
    return ("m", name)


def dfun(sym, *args):
    return ("f", sym, tuple(args))


def dset(elems):
    return ("s", tuple(sorted(set(elems))))


def drule(lhs, rhs, n=None):
    if n is None:
        n = max_index(lhs)
    return ("r", lhs, n, rhs)


def dapp(u, v):
    return ("a", u, v)


def clo(t, s):
    return ("c", t, s)


def lift(s, n=1):
    for _ in range(n):
        s = ("L", s)
    return s


def cons(t, s):
    return (".", t, s)


def comp(s, t):
    return ("o", s, t)


def shift_n(n):
    """The n-fold shift as a right-nested composition."""
    if n < 1:
        return ID
    s = SH
    for _ in range(n - 1):
        s = ("o", SH, s)
    return s


def is_term(x):
    return x[0] in TERM_TAGS


def max_index(t):
    tag = t[0]
    if tag == "i":
        return t[1]
    if tag == "f":
        return max((max_index(a) for a in t[2]), default=0)
    return 0


# ---------------------------------------------------------------------------
# translation

def to_debruijn(t, referential=()):
    """Named term -> de Bruijn term; binder order is first occurrence in lhs."""
    return _tr(t, list(referential))


def _tr(t, ref):
    tag = t.tag
    if tag == VAR:
        try:
            return ("i", ref.index(t.name) + 1)
        except ValueError:
            raise UnboundVariable("variable %s not in referential" % t.name)
    if tag == FUN:
        return ("f", t.sym, tuple(_tr(a, ref) for a in t.args))
    if tag == SET:
        return dset(_tr(e, ref) for e in t.elems)
    if tag == APP:
        return ("a", _tr(t.fun, ref), _tr(t.arg, ref))
    if tag == RULE:
        vs = first_order_vars(t.lhs)
        ref2 = vs + ref
        return ("r", _tr(t.lhs, ref2), len(vs), _tr(t.rhs, ref2))
    raise ValueError("no de Bruijn form for %s" % (t,))


def from_debruijn(d, referential=(), prefix="v"):
    """Back to named syntax, inventing binder names v1, v2, ..."""
    from .terms import Var, Fun, Set, Rule, App
    counter = [0]
    ref = list(referential)

    def go(t, ref):
        tag = t[0]
        if tag == "i":
            if t[1] > len(ref):
                raise UnboundVariable("index %d escapes" % t[1])
            return Var(ref[t[1] - 1])
        if tag == "m":
            return Var(t[1])
        if tag == "f":
            return Fun(t[1], [go(a, ref) for a in t[2]])
        if tag == "s":
            return Set([go(e, ref) for e in t[1]])
        if tag == "a":
            return App(go(t[1], ref), go(t[2], ref))
        if tag == "r":
            names = []
            for _ in range(t[2]):
                counter[0] += 1
                names.append("%s%d" % (prefix, counter[0]))
            r2 = names + ref
            return Rule(go(t[1], r2), go(t[3], r2))
        raise ValueError("closure left in %r" % (t,))
    return go(d, ref)


# ---------------------------------------------------------------------------
# printing

def show_db(x):
    tag = x[0]
    if tag == "i":
        return str(x[1])
    if tag == "m":
        return x[1]
    if tag == "f":
        return x[1] + ("(" + ", ".join(map(show_db, x[2])) + ")" if x[2] else "")
    if tag == "s":
        return "{" + ", ".join(map(show_db, x[1])) + "}"
    if tag == "r":
        lhs = show_db(x[1])
        return "%s ->%d %s" % (lhs, x[2], show_db(x[3]))
    if tag == "a":
        return "[%s](%s)" % (show_db(x[1]), show_db(x[2]))
    if tag == "c":
        inner = show_db(x[1])
        if x[1][0] == "r":
            inner = "(" + inner + ")"
        return "%s<%s>" % (inner, show_db(x[2]))
    if tag == "ID":
        return "id"
    if tag == "SH":
        return "^"
    if tag == "L":
        return "lift(%s)" % show_db(x[1])
    if tag == ".":
        return "%s.%s" % (_atomic(x[1]), show_db(x[2]))
    if tag == "o":
        n = _shift_power(x)
        if n:
            return "^%d" % n
        return "(%s o %s)" % (show_db(x[1]), show_db(x[2]))
    if tag == "ms":
        return x[1]
    raise ValueError(x)


def _atomic(t):
    s = show_db(t)
    return "(" + s + ")" if t[0] in ("r", "c") else s


def _shift_power(s):
    n = 0
    while s[0] == "o" and s[1] == SH:
        n += 1
        s = s[2]
    if s == SH:
        return n + 1
    return 0


# ---------------------------------------------------------------------------
# matching over indices

def match_db(l, t):
    """t1...tn.ID on success, None on failure (n = max index of l)."""
    n = max_index(l)
    binding = {}
    work = [(l, t)]
    while work:
        p, s = work.pop()
        if p[0] == "i":
            prev = binding.get(p[1])
            if prev is None:
                binding[p[1]] = s
            elif prev != s:
                return None
            continue
        if p[0] != "f":
            raise ValueError("pattern is not first-order: %s" % show_db(l))
        if s[0] != "f" or s[1] != p[1] or len(s[2]) != len(p[2]):
            return None
        work.extend(zip(p[2], s[2]))
    out = ID
    for i in range(n, 0, -1):
        out = (".", binding.get(i, ("i", i)), out)
    return out


# ---------------------------------------------------------------------------
# the sigma rules

def sigma_head(x):
    """(rule_name, result) for a sigma redex at the root of x, else None."""
    tag = x[0]
    if tag == "c":
        u, s = x[1], x[2]
        if s == ID:
            return "id", u
        ut = u[0]
        if ut == "r":
            ls = lift(s, u[2])
            return "lam", ("r", ("c", u[1], ls), u[2], ("c", u[3], ls))
        if ut == "a":
            return "app", ("a", ("c", u[1], s), ("c", u[2], s))
        if ut == "c":
            return "clos", ("c", u[1], ("o", u[2], s))
        if ut == "s":
            return "set", dset(("c", e, s) for e in u[1])
        if ut == "f":
            return "op", ("f", u[1], tuple(("c", a, s) for a in u[2]))
        if ut == "i":
            n = u[1]
            st = s[0]
            if s == SH:
                return "vs1", ("i", n + 1)
            if st == "o" and s[1] == SH:
                return "vs2", ("c", ("i", n + 1), s[2])
            if n == 1:
                if st == ".":
                    return "fv", s[1]
                if st == "L":
                    return "fvl1", ("i", 1)
                if st == "o" and s[1][0] == "L":
                    return "fvl2", ("c", ("i", 1), s[2])
            else:
                if st == ".":
                    return "rv", ("c", ("i", n - 1), s[2])
                if st == "L":
                    return "rvl1", ("c", ("i", n - 1), ("o", s[1], SH))
                if st == "o" and s[1][0] == "L":
                    return "rvl2", ("c", ("i", n - 1),
                                    ("o", s[1][1], ("o", SH, s[2])))
        return None
    if tag == "o":
        a, b = x[1], x[2]
        at, bt = a[0], b[0]
        if at == "o":
            return "ass", ("o", a[1], ("o", a[2], b))
        if at == ".":
            return "map", (".", ("c", a[1], b), ("o", a[2], b))
        if at == "ID":
            return "il", b
        if bt == "ID":
            return "ir", a
        if at == "SH":
            if bt == ".":
                return "sc", b[2]
            if bt == "L":
                return "sl1", ("o", b[1], SH)
            if bt == "o" and b[1][0] == "L":
                return "sl2", ("o", b[1][1], ("o", SH, b[2]))
        if at == "L":
            if bt == "L":
                return "l1", ("L", ("o", a[1], b[1]))
            if bt == "o" and b[1][0] == "L":
                return "l2", ("o", ("L", ("o", a[1], b[1][1])), b[2])
            if bt == ".":
                return "le", (".", b[1], ("o", a[1], b[2]))
        return None
    if tag == "L" and x[1] == ID:
        return "li", ID
    return None


def children(x):
    tag = x[0]
    if tag == "f":
        return x[2]
    if tag == "s":
        return x[1]
    if tag == "r":
        return (x[1], x[3])
    if tag in ("a", "c", ".", "o"):
        return (x[1], x[2])
    if tag == "L":
        return (x[1],)
    return ()


def rebuild(x, ch):
    tag = x[0]
    if tag == "f":
        return ("f", x[1], tuple(ch))
    if tag == "s":
        return dset(ch)
    if tag == "r":
        return ("r", ch[0], x[2], ch[1])
    if tag in ("a", "c", ".", "o"):
        return (tag, ch[0], ch[1])
    if tag == "L":
        return ("L", ch[0])
    return x


def sigma_step(x):
    """One leftmost-outermost sigma step: (rule_name, new) or None."""
    h = sigma_head(x)
    if h is not None:
        return h
    ch = children(x)
    for i, c in enumerate(ch):
        r = sigma_step(c)
        if r is not None:
            new = list(ch)
            new[i] = r[1]
            return r[0], rebuild(x, new)
    return None


def sigma_all_steps(x):
    """Every one-step sigma reduct as (rule_name, redex, contractum, new)."""
    out = []
    h = sigma_head(x)
    if h is not None:
        out.append((h[0], x, h[1], h[1]))
    ch = children(x)
    for i, c in enumerate(ch):
        for name, red, con, new_c in sigma_all_steps(c):
            new = list(ch)
            new[i] = new_c
            out.append((name, red, con, rebuild(x, new)))
    return out


def sigma_normalize(x, max_steps=100000):
    """Sigma normal form; also returns the number of steps taken."""
    n = 0
    while n < max_steps:
        r = sigma_step(x)
        if r is None:
            return x, n
        x = r[1]
        n += 1
    raise RuntimeError("sigma normalization exceeded %d steps" % max_steps)


def has_closure(x):
    if x[0] == "c":
        return True
    return any(has_closure(c) for c in children(x))


def subst_nf_shape(s):
    """Name of the normal-form shape of a substitution, or None."""
    if s == ID:
        return "ID"
    if s[0] == ".":
        return "cons"
    if _shift_power(s):
        return "shift"
    if s[0] == "L":
        return "lift-shift"
    if s[0] == "o" and s[1][0] == "L" and _shift_power(s[2]):
        return "lift-shift"
    return None


# ---------------------------------------------------------------------------
# termination measure (lexicographic pair of polynomial interpretations)

def _D(x):
    if x[0] == "s":
        return sum(_D(e) for e in x[1]) + 1
    return 1


def measure(x):
    """(P1, P2) of a term or substitution."""
    tag = x[0]
    if tag == "i":
        return 2 ** x[1], 1
    if tag in ("m", "ms", "ID", "SH"):
        return 2, 1
    if tag == "f":
        args = x[2]
        if not args:
            return 2, 1
        ms = [measure(a) for a in args]
        ds = [_D(a) for a in args]
        prod = 1
        for d in ds:
            prod *= d
        p1 = p2 = 0
        for i, (a1, a2) in enumerate(ms):
            rest = 1
            for j, d in enumerate(ds):
                if j != i:
                    rest *= d
            p1 += a1 * rest
            p2 += a2 * rest
        return p1 + prod, p2 + prod
    if tag == "s":
        ms = [measure(e) for e in x[1]]
        return sum(m[0] for m in ms) + 2, sum(m[1] for m in ms) + 1
    if tag == "a":
        (u1, u2), (v1, v2) = measure(x[1]), measure(x[2])
        du, dv = _D(x[1]), _D(x[2])
        return u1 * dv + v1 * du, u2 * dv + v2 * du + du * dv
    if tag == "r":
        (u1, u2), (v1, v2) = measure(x[1]), measure(x[3])
        du, dv = _D(x[1]), _D(x[3])
        return u1 * dv + v1 * du + 2 * du * dv, 2 * (u2 * dv + v2 * du)
    if tag == "c" or tag == "o":
        (a1, a2), (b1, b2) = measure(x[1]), measure(x[2])
        return a1 * b1, a2 * (b2 + 1)
    if tag == "L":
        a1, a2 = measure(x[1])
        return a1, 4 * a2
    if tag == ".":
        (a1, a2), (b1, b2) = measure(x[1]), measure(x[2])
        return a1 + b1, a2 + b2 + 1
    raise ValueError(x)


# ---------------------------------------------------------------------------
# base rules and the combined evaluator

def _first_order(l):
    if l[0] == "i":
        return True
    if l[0] == "f":
        return all(_first_order(a) for a in l[2])
    return False


def _ground_fo(t):
    return t[0] == "f" and all(_ground_fo(a) for a in t[2])


def _indices(l, acc):
    if l[0] == "i":
        acc.append(l[1])
    else:
        for c in children(l):
            _indices(c, acc)
    return acc


def _weakly_subsumes(l, t):
    if l[0] != "f":
        return True
    if t[0] != "f":
        return False
    return all(_weakly_subsumes(a, b) for a, b in zip(l[2], t[2]))


def _safe(t):
    tag = t[0]
    if tag == "s" and len(t[1]) != 1:
        return False
    if tag == "c":
        return False
    if tag == "a":
        f = t[1]
        if f[0] != "r" or not _first_order(f[1]) or match_db(f[1], t[2]) is None:
            return False
    return all(_safe(c) for c in children(t))


def db_fire_allowed(gate, l, t):
    gate = Gate.parse(gate)
    if gate is Gate.NONE:
        return True
    if _ground_fo(t):
        return True
    if gate is Gate.STRICT:
        return False
    if gate is not Gate.CONFSTRAT:
        raise ValueError("explicit evaluator supports none/strict/confstrat")
    ix = _indices(l, [])
    if len(ix) != len(set(ix)) or not _weakly_subsumes(l, t):
        return False
    return _safe(t)


def base_head(t, gate):
    tag = t[0]
    if tag == "a":
        f, a = t[1], t[2]
        if f[0] == "s":
            return "Distrib", dset(("a", u, a) for u in f[1])
        if a[0] == "s":
            return "Batch", dset(("a", f, u) for u in a[1])
        if f[0] == "r":
            if _first_order(f[1]) and db_fire_allowed(gate, f[1], a):
                sig = match_db(f[1], a)
                if sig is None:
                    return "Fire", ("s", ())
                return "Fire", ("s", (("c", f[3], sig),))
        elif f[0] == "f" and a[0] == "f":
            if f[1] == a[1] and len(f[2]) == len(a[2]):
                return "Congruence", ("s", (("f", f[1], tuple(
                    ("a", u, v) for u, v in zip(f[2], a[2]))),))
            return "Congruence_fail", ("s", ())
        return None
    if tag == "r" and t[3][0] == "s":
        return "Switch_R", dset(("r", t[1], t[2], v) for v in t[3][1])
    if tag == "f":
        for i, u in enumerate(t[2]):
            if u[0] == "s":
                return "OpOnSet", dset(
                    ("f", t[1], t[2][:i] + (e,) + t[2][i + 1:]) for e in u[1])
        return None
    if tag == "s":
        for u in t[1]:
            if u[0] == "s":
                rest = [e for e in t[1] if e is not u]
                return "Flat", dset(rest + list(u[1]))
    return None


def _order(t, weak):
    tag = t[0]
    if tag == "a":
        return (1, 0)
    if tag == "r":
        return () if weak else (1,)
    if tag == "c":
        return ()
    return range(len(children(t)))


def _base_find(t, gate, weak):
    h = base_head(t, gate)
    if h is not None:
        return h
    ch = children(t)
    for i in _order(t, weak):
        r = _base_find(ch[i], gate, weak)
        if r is not None:
            new = list(ch)
            new[i] = r[1]
            return r[0], rebuild(t, new)
    return None


def _base_in_bodies(t, gate):
    if t[0] == "r":
        r = _base_step(t[3], gate)
        if r is not None:
            return r[0], ("r", t[1], t[2], r[1])
        return None
    ch = children(t)
    for i in _order(t, True):
        r = _base_in_bodies(ch[i], gate)
        if r is not None:
            new = list(ch)
            new[i] = r[1]
            return r[0], rebuild(t, new)
    return None


def _base_step(t, gate):
    return _base_find(t, gate, True) or _base_in_bodies(t, gate)


@dataclass
class DBResult:
    kind: str
    term: tuple
    steps: int
    sigma_steps: int
    base_steps: int
    trace: Optional[list] = None


def rhosigma_step(t, gate=Gate.CONFSTRAT):
    """A sigma step when one exists, otherwise a base step."""
    r = sigma_step(t)
    if r is not None:
        return r
    return _base_step(t, gate)


def rhosigma_normalize(t, gate=Gate.CONFSTRAT, max_steps=10000, trace=False):
    tr = [] if trace else None
    ns = nb = 0
    while ns + nb < max_steps:
        r = sigma_step(t)
        if r is not None:
            ns += 1
        else:
            r = _base_step(t, gate)
            if r is None:
                return DBResult("NormalForm", t, ns + nb, ns, nb, tr)
            nb += 1
        if tr is not None:
            tr.append(r[0])
        t = r[1]
    kind = "NormalForm" if rhosigma_step(t, gate) is None else "StepLimit"
    return DBResult(kind, t, ns + nb, ns, nb, tr)
