"""Term data model for the rewriting calculus.

Terms are immutable.  Every node carries a structural sort key (used to
keep sets canonical) and a cached hash.  Set and UChoice nodes sort and
deduplicate their elements on construction, so the ACI comma is part of
the representation rather than something handled modulo.
"""

from __future__ import annotations

from typing import Iterable

# variant tags; their numeric order is the first component of the total order
VAR, FUN, SET, RULE, APP, FIRST, CHOICE, DC, UCHOICE, PHI, PSI = range(11)

TAG_NAMES = ["Var", "Fun", "Set", "Rule", "App", "First", "Choice", "Dc",
             "UChoice", "Phi", "Psi"]


class PositionError(ValueError):
    pass


class Term:
    __slots__ = ("key", "_h", "_fv", "_av", "_pv", "_size")
    tag = -1

    def _finish(self, key):
        self.key = key
        self._h = hash(key[:2] + tuple(c._h for c in self.children))
        self._fv = None
        self._av = None
        self._pv = None
        self._size = None

    children: tuple = ()

    def rebuild(self, children):
        raise NotImplementedError

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Term) or self._h != other._h:
            return False
        return self.key == other.key

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return self._h

    def __lt__(self, other):
        return self.key < other.key

    def __repr__(self):
        from .syntax import show
        return "<%s %s>" % (TAG_NAMES[self.tag], show(self))

    def __str__(self):
        from .syntax import show
        return show(self)


class Var(Term):
    __slots__ = ("name",)
    tag = VAR
    children = ()

    def __init__(self, name: str):
        self.name = name
        self._finish((VAR, name, 0, ()))

    def rebuild(self, children):
        return self


class Fun(Term):
    __slots__ = ("sym", "args")
    tag = FUN

    def __init__(self, sym: str, args: Iterable[Term] = ()):
        self.sym = sym
        self.args = tuple(args)
        self._finish((FUN, sym, len(self.args),
                      tuple(a.key for a in self.args)))

    @property
    def children(self):
        return self.args

    def rebuild(self, children):
        return Fun(self.sym, children)


def _canon(elems):
    out = sorted(set(elems), key=lambda t: t.key)
    return tuple(out)


class Set(Term):
    __slots__ = ("elems",)
    tag = SET

    def __init__(self, elems: Iterable[Term] = ()):
        self.elems = _canon(elems)
        self._finish((SET, "", len(self.elems),
                      tuple(e.key for e in self.elems)))

    @property
    def children(self):
        return self.elems

    def rebuild(self, children):
        return Set(children)

    def is_empty(self):
        return not self.elems


class Rule(Term):
    __slots__ = ("lhs", "rhs", "ctx")
    tag = RULE

    def __init__(self, lhs: Term, rhs: Term, ctx=None):
        self.lhs = lhs
        self.rhs = rhs
        if ctx is not None:
            ctx = tuple(sorted(dict(ctx).items()))
        self.ctx = ctx
        ck = () if ctx is None else tuple((n, str(ty)) for n, ty in ctx)
        self._finish((RULE, "", 2, (lhs.key, rhs.key), ck))

    @property
    def children(self):
        return (self.lhs, self.rhs)

    def rebuild(self, children):
        return Rule(children[0], children[1], self.ctx)

    def ctx_dict(self):
        return dict(self.ctx) if self.ctx is not None else None


class App(Term):
    __slots__ = ("fun", "arg")
    tag = APP

    def __init__(self, fun: Term, arg: Term):
        self.fun = fun
        self.arg = arg
        self._finish((APP, "", 2, (fun.key, arg.key)))

    @property
    def children(self):
        return (self.fun, self.arg)

    def rebuild(self, children):
        return App(children[0], children[1])


class _Listy(Term):
    __slots__ = ("args",)
    canonical = False

    def __init__(self, args: Iterable[Term] = ()):
        args = tuple(args)
        if self.canonical:
            args = _canon(args)
        self.args = args
        self._finish((self.tag, "", len(args), tuple(a.key for a in args)))

    @property
    def children(self):
        return self.args

    def rebuild(self, children):
        return type(self)(children)


class First(_Listy):
    """The unapplied first(s1, ..., sn) strategy."""
    __slots__ = ()
    tag = FIRST


class Choice(_Listy):
    """Pending ordered choice <t1, ..., tn>."""
    __slots__ = ()
    tag = CHOICE


class Dc(_Listy):
    """The unapplied dc(s1, ..., sn) strategy."""
    __slots__ = ()
    tag = DC


class UChoice(_Listy):
    """Pending unordered choice <<t1, ..., tn>>."""
    __slots__ = ()
    tag = UCHOICE
    canonical = True


class Phi(Term):
    """Native one-argument traversal operator."""
    __slots__ = ("arg",)
    tag = PHI

    def __init__(self, arg: Term):
        self.arg = arg
        self._finish((self.tag, "", 1, (arg.key,)))

    @property
    def children(self):
        return (self.arg,)

    def rebuild(self, children):
        return type(self)(children[0])


class Psi(Phi):
    """Native all-arguments traversal operator."""
    __slots__ = ()
    tag = PSI


EMPTY = Set(())

OPERATOR_TAGS = (FIRST, CHOICE, DC, UCHOICE)


# ---------------------------------------------------------------------------
# small constructors

def var(name):
    return Var(name)


def const(name):
    return Fun(name, ())


def fun(sym, *args):
    return Fun(sym, args)


def mkset(*elems):
    return Set(elems)


def rule(lhs, rhs, ctx=None):
    return Rule(lhs, rhs, ctx)


def app(f, *args):
    """app(f, a, b) is [[f](a)](b)."""
    out = f
    for a in args:
        out = App(out, a)
    return out


# ---------------------------------------------------------------------------
# signatures

class Signature:
    """Symbol arities plus optional type profiles.

    A profile is a pair (argument types tuple, result type).
    """

    def __init__(self, symbols=None, profiles=None):
        self.symbols = dict(symbols or {})
        self.profiles = {}
        for name, profs in (profiles or {}).items():
            for p in profs:
                self.add_profile(name, p[0], p[1])

    def declare(self, name, arity):
        if name in self.symbols and self.symbols[name] != arity:
            raise ValueError("symbol %s already has arity %d"
                             % (name, self.symbols[name]))
        self.symbols[name] = arity

    def add_profile(self, name, argtypes, result):
        argtypes = tuple(argtypes)
        self.declare(name, len(argtypes))
        lst = self.profiles.setdefault(name, [])
        if (argtypes, result) not in lst:
            lst.append((argtypes, result))

    def arity(self, name):
        return self.symbols.get(name)

    def constants(self):
        return sorted(n for n, a in self.symbols.items() if a == 0)

    def functions(self):
        return sorted(n for n, a in self.symbols.items() if a > 0)

    def __contains__(self, name):
        return name in self.symbols

    def check(self, t):
        """Raise ValueError on an arity mismatch anywhere in t."""
        for s, _ in iter_subterms(t):
            if isinstance(s, Fun):
                a = self.symbols.get(s.sym)
                if a is None:
                    raise ValueError("undeclared symbol %s" % s.sym)
                if a != len(s.args):
                    raise ValueError("arity mismatch for %s: expected %d, got %d"
                                     % (s.sym, a, len(s.args)))

    def __repr__(self):
        return "Signature(%r)" % self.symbols


# ---------------------------------------------------------------------------
# variable analyses

class _Top:
    """The 'all variables' element of present-variable sets."""
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "TOP"

    def __contains__(self, x):
        return True

    def __and__(self, other):
        return other

    def __rand__(self, other):
        return other

    def __or__(self, other):
        return self

    def __ror__(self, other):
        return self

    def __sub__(self, other):
        return self

    def __le__(self, other):
        return other is self

    def __ge__(self, other):
        return True

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return 0x70b


TOP = _Top()


def free_vars(t: Term) -> frozenset:
    fv = t._fv
    if fv is not None:
        return fv
    if t.tag == VAR:
        fv = frozenset((t.name,))
    elif t.tag == RULE:
        fv = free_vars(t.rhs) - free_vars(t.lhs)
    else:
        fv = frozenset()
        for c in t.children:
            fv = fv | free_vars(c)
    t._fv = fv
    return fv


def all_vars(t: Term) -> frozenset:
    """Every variable name occurring in t, bound or free."""
    av = t._av
    if av is not None:
        return av
    if t.tag == VAR:
        av = frozenset((t.name,))
    else:
        av = frozenset()
        for c in t.children:
            av = av | all_vars(c)
    t._av = av
    return av


def present_vars(t: Term):
    """PV(t); returns a frozenset or TOP."""
    pv = t._pv
    if pv is not None:
        return pv
    tag = t.tag
    if tag == VAR:
        pv = frozenset((t.name,))
    elif tag == SET:
        if not t.elems:
            pv = TOP
        else:
            pv = TOP
            for e in t.elems:
                pv = pv & present_vars(e)
    elif tag == RULE:
        pv = present_vars(t.rhs) - free_vars(t.lhs)
    else:
        # Fun, App and the first/dc/choice/traversal operators: union
        pv = frozenset()
        for c in t.children:
            pv = pv | present_vars(c)
    t._pv = pv
    return pv


def size(t: Term) -> int:
    s = t._size
    if s is None:
        s = 1 + sum(size(c) for c in t.children)
        t._size = s
    return s


def depth(t: Term) -> int:
    return 1 + max((depth(c) for c in t.children), default=0)


def is_first_order(t: Term) -> bool:
    if t.tag == VAR:
        return True
    if t.tag == FUN:
        return all(is_first_order(a) for a in t.args)
    return False


def is_ground_first_order(t: Term) -> bool:
    if t.tag == FUN:
        return all(is_ground_first_order(a) for a in t.args)
    return False


def var_occurrences(t: Term, acc=None):
    """Multiset (dict name -> count) of variable occurrences in t."""
    if acc is None:
        acc = {}
    if t.tag == VAR:
        acc[t.name] = acc.get(t.name, 0) + 1
    else:
        for c in t.children:
            var_occurrences(c, acc)
    return acc


def is_linear(t: Term) -> bool:
    return all(n == 1 for n in var_occurrences(t).values())


def first_order_vars(t: Term):
    """Variables of a first-order term in left-to-right first-occurrence order."""
    out = []
    seen = set()

    def walk(s):
        if s.tag == VAR:
            if s.name not in seen:
                seen.add(s.name)
                out.append(s.name)
        else:
            for c in s.children:
                walk(c)
    walk(t)
    return out


# ---------------------------------------------------------------------------
# positions

def subterm_at(t: Term, p) -> Term:
    for i in p:
        ch = t.children
        if not 1 <= i <= len(ch):
            raise PositionError("invalid position %r" % (tuple(p),))
        t = ch[i - 1]
    return t


def replace_at(t: Term, p, s: Term) -> Term:
    p = tuple(p)
    if not p:
        return s
    ch = t.children
    i = p[0]
    if not 1 <= i <= len(ch):
        raise PositionError("invalid position %r" % (p,))
    new = list(ch)
    new[i - 1] = replace_at(ch[i - 1], p[1:], s)
    return t.rebuild(new)


def iter_subterms(t: Term, pos=()):
    """Pre-order walk yielding (subterm, position)."""
    yield t, pos
    for i, c in enumerate(t.children, 1):
        yield from iter_subterms(c, pos + (i,))


def positions(t: Term):
    return [p for _, p in iter_subterms(t)]


def format_position(p) -> str:
    return ".".join(str(i) for i in p) if p else "eps"


def contains_empty(t: Term) -> bool:
    if t.tag == SET and not t.elems:
        return True
    return any(contains_empty(c) for c in t.children)


def count_nodes(t: Term, tag: int) -> int:
    n = 1 if t.tag == tag else 0
    return n + sum(count_nodes(c, tag) for c in t.children)


def is_rho_empty_term(t: Term) -> bool:
    """True when t uses only the base constructors (no first/dc/traversals)."""
    if t.tag > APP:
        return False
    return all(is_rho_empty_term(c) for c in t.children)


def lhs_is_first_order(t: Term) -> bool:
    """Default profile check: every rule lhs is a first-order term."""
    for s, _ in iter_subterms(t):
        if s.tag == RULE and not is_first_order(s.lhs):
            return False
    return True
