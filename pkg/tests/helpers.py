"""Random generators and independent oracles shared by the test suites.

The oracles here deliberately avoid the library's own matching and
substitution code; they work on plain tuples.
"""

import itertools

from rhocalc.terms import Var, Fun, Set, Rule, App, VAR, FUN, size
from rhocalc.stypes import Atom, Arrow
from rhocalc.terms import Signature
from rhocalc import explicit as ex
from rhocalc.encodings import LVar, Abs, LApp

CONSTS = ("a", "b", "c")
FUNS = (("f", 1), ("g", 2))


# ---------------------------------------------------------------------------
# first-order tuples: ('v', name) or (sym, args)

def to_tuple(t):
    if t.tag == VAR:
        return ("v", t.name)
    if t.tag == FUN:
        return (t.sym, tuple(to_tuple(a) for a in t.args))
    raise ValueError("not first-order")


def from_tuple(x):
    if x[0] == "v":
        return Var(x[1])
    return Fun(x[0], [from_tuple(a) for a in x[1]])


def t_subst(x, s):
    if x[0] == "v":
        return s.get(x[1], x)
    return (x[0], tuple(t_subst(a, s) for a in x[1]))


def t_vars(x, acc=None):
    acc = [] if acc is None else acc
    if x[0] == "v":
        if x[1] not in acc:
            acc.append(x[1])
    else:
        for a in x[1]:
            t_vars(a, acc)
    return acc


def t_subterms(x):
    yield x
    if x[0] != "v":
        for a in x[1]:
            yield from t_subterms(a)


def t_size(x):
    return 1 if x[0] == "v" else 1 + sum(t_size(a) for a in x[1])


def brute_force_match(p, t):
    """All substitutions (over subterms of t) with p instantiated to t."""
    vs = t_vars(p)
    cands = list(dict.fromkeys(t_subterms(t)))
    out = []
    for combo in itertools.product(cands, repeat=len(vs)):
        s = dict(zip(vs, combo))
        if t_subst(p, s) == t:
            out.append(s)
    return out


def rand_fo(rng, depth, vars_=(), consts=CONSTS, funs=FUNS, pvar=0.3):
    if vars_ and rng.random() < pvar:
        return ("v", rng.choice(vars_))
    if depth <= 0 or rng.random() < 0.35:
        return (rng.choice(consts), ())
    f, n = rng.choice(funs)
    return (f, tuple(rand_fo(rng, depth - 1, vars_, consts, funs, pvar)
                     for _ in range(n)))


# ---------------------------------------------------------------------------
# untyped rho terms of bounded size

class RhoGen:
    """Random rho-terms (no strategy operators) with at most `max_size` nodes."""

    def __init__(self, rng, max_size=10, closed=False):
        self.rng = rng
        self.max_size = max_size
        self.closed = closed
        self.n = 0

    def fresh(self):
        self.n += 1
        return "x%d" % self.n

    def pattern(self, budget):
        """First-order lhs; returns (term, size, new variable names)."""
        rng = self.rng
        vs = []

        def go(b):
            r = rng.random()
            if b <= 1 or r < 0.45:
                if rng.random() < 0.6:
                    if vs and rng.random() < 0.2:
                        return Var(rng.choice(vs)), 1
                    v = self.fresh()
                    vs.append(v)
                    return Var(v), 1
                return Fun(rng.choice(CONSTS), ()), 1
            f, n = rng.choice(FUNS)
            if n + 1 > b:
                f, n = "f", 1
            args, used = [], 1
            for i in range(n):
                a, s = go(max(1, (b - used) // (n - i)))
                args.append(a)
                used += s
            return Fun(f, args), used
        t, s = go(budget)
        return t, s, vs

    def term(self, budget, scope=()):
        rng = self.rng
        if budget <= 1:
            return self.leaf(scope)
        k = rng.random()
        if k < 0.35 and budget >= 3:
            # application, usually of a rule (or set of rules)
            fb = rng.randint(2, budget - 1) if budget > 3 else 2
            if rng.random() < 0.8:
                u = self.rule(fb, scope)
            else:
                u = self.term(fb - 1, scope)
            v = self.term(budget - 1 - size(u), scope)
            return App(u, v)
        if k < 0.55 and budget >= 3:
            return self.rule(budget, scope)
        if k < 0.7:
            n = rng.choice((0, 1, 2, 2))
            if n == 0:
                return Set(())
            elems = []
            left = budget - 1
            for i in range(n):
                b = max(1, left // (n - i))
                e = self.term(b, scope)
                left -= size(e)
                elems.append(e)
            return Set(elems)
        if k < 0.85 and budget >= 3:
            a1 = self.term((budget - 1) // 2, scope)
            a2 = self.term(budget - 1 - size(a1), scope)
            return Fun("g", [a1, a2])
        return Fun("f", [self.term(budget - 1, scope)])

    def rule(self, budget, scope):
        lb = self.rng.randint(1, max(1, min(4, budget - 2)))
        l, ls, vs = self.pattern(lb)
        r = self.term(max(1, budget - 1 - ls), tuple(scope) + tuple(vs))
        return Rule(l, r)

    def leaf(self, scope):
        rng = self.rng
        if scope and rng.random() < 0.5:
            return Var(rng.choice(scope))
        if not self.closed and rng.random() < 0.15:
            return Var("y")
        return Fun(rng.choice(CONSTS), ())

    def __call__(self):
        while True:
            t = self.term(self.rng.randint(3, self.max_size))
            if size(t) <= self.max_size:
                return t


# ---------------------------------------------------------------------------
# well-typed terms

A, B = Atom("A"), Atom("B")


def typed_signature():
    """One base profile per symbol (see the typing notes in the ledger)."""
    sig = Signature()
    for name, args, res in (("a", [], A), ("b", [], A), ("c", [], B),
                            ("d", [], B), ("f", [A], A), ("g", [A, B], B),
                            ("h", [B], A)):
        sig.declare(name, len(args))
        sig.add_profile(name, args, res)
    return sig


_CONST_OF = {A: ("a", "b"), B: ("c", "d")}
_FUN_OF = {A: (("f", [A]), ("h", [B])), B: (("g", [A, B]),)}


class TypedGen:
    """Random closed terms of the simply typed calculus with explicit
    annotations on every lhs variable."""

    def __init__(self, rng, max_size=12):
        self.rng = rng
        self.max_size = max_size
        self.n = 0

    def fresh(self):
        self.n += 1
        return "x%d" % self.n

    def ty(self, depth=1):
        if depth <= 0 or self.rng.random() < 0.6:
            return self.rng.choice((A, B))
        return Arrow(self.ty(depth - 1), self.ty(depth - 1))

    def pattern(self, ty, budget, ctx):
        """First-order pattern of base type ty; binds fresh annotated vars."""
        rng = self.rng
        if isinstance(ty, Arrow) or budget <= 1 or rng.random() < 0.55:
            if isinstance(ty, Arrow) or rng.random() < 0.75:
                v = self.fresh()
                ctx[v] = ty
                return Var(v)
            return Fun(rng.choice(_CONST_OF[ty]), ())
        f, args = rng.choice(_FUN_OF[ty])
        return Fun(f, [self.pattern(a, budget // len(args), ctx) for a in args])

    def term(self, ty, budget, env):
        rng = self.rng
        k = rng.random()
        cands = [v for v, t in env.items() if t == ty]
        if isinstance(ty, Arrow):
            if budget >= 3 and k < 0.85:
                return self.rule(ty, budget, env)
            if cands:
                return Var(rng.choice(cands))
            return self.rule(ty, max(budget, 2), env)
        if budget <= 1 or k < 0.2:
            if cands and rng.random() < 0.6:
                return Var(rng.choice(cands))
            return Fun(rng.choice(_CONST_OF[ty]), ())
        if k < 0.55 and budget >= 4:
            dom = self.ty(1)
            fb = rng.randint(2, budget - 2)
            u = self.term(Arrow(dom, ty), fb, env)
            v = self.term(dom, budget - 1 - size(u), env)
            return App(u, v)
        if k < 0.65 and budget >= 3:
            # a bare {} has no synthesizable type, so sets here are non-empty
            n = rng.choice((1, 2))
            return Set([self.term(ty, (budget - 1) // max(n, 1), env)
                        for _ in range(n)])
        f, args = rng.choice(_FUN_OF[ty])
        per = max(1, (budget - 1) // len(args))
        return Fun(f, [self.term(a, per, env) for a in args])

    def rule(self, ty, budget, env):
        lctx = {}
        lhs = self.pattern(ty.dom, self.rng.randint(1, 3), lctx)
        env2 = dict(env)
        env2.update(lctx)
        rhs = self.term(ty.cod, max(1, budget - 1 - size(lhs)), env2)
        return Rule(lhs, rhs, ctx=lctx)

    def __call__(self):
        while True:
            ty = self.ty(1)
            t = self.term(ty, self.rng.randint(2, self.max_size), {})
            if size(t) <= self.max_size:
                return t, ty


# ---------------------------------------------------------------------------
# de Bruijn terms and substitutions

class DBGen:
    def __init__(self, rng, metavars=False):
        self.rng = rng
        self.metavars = metavars

    def term(self, b):
        rng = self.rng
        if b <= 1:
            k = rng.random()
            if self.metavars and k < 0.15:
                return ex.mvar("X")
            if k < 0.6:
                return ex.idx(rng.randint(1, 3))
            return ex.dfun(rng.choice(CONSTS))
        k = rng.random()
        if k < 0.35:
            s = self.subst(max(1, b // 2))
            return ex.clo(self.term(max(1, b - 1 - ex_size(s))), s)
        if k < 0.5 and b >= 4:
            lhs = ex.dfun("f", ex.idx(1)) if rng.random() < 0.5 else \
                ex.dfun("g", ex.idx(1), ex.idx(2))
            return ex.drule(lhs, self.term(b - 1 - ex_size(lhs)))
        if k < 0.65 and b >= 3:
            u = self.term((b - 1) // 2)
            return ex.dapp(u, self.term(b - 1 - ex_size(u)))
        if k < 0.8:
            n = rng.choice((0, 1, 2))
            return ex.dset([self.term(max(1, (b - 1) // max(n, 1)))
                            for _ in range(n)])
        if b >= 3:
            u = self.term((b - 1) // 2)
            return ex.dfun("g", u, self.term(max(1, b - 1 - ex_size(u))))
        return ex.dfun("f", self.term(b - 1))

    def subst(self, b):
        rng = self.rng
        if b <= 1:
            if self.metavars and rng.random() < 0.15:
                return ("ms", "S")
            return rng.choice((ex.ID, ex.SH))
        k = rng.random()
        if k < 0.25:
            return ex.lift(self.subst(b - 1))
        if k < 0.55:
            t = self.term(max(1, (b - 1) // 2))
            return ex.cons(t, self.subst(max(1, b - 1 - ex_size(t))))
        s = self.subst(max(1, (b - 1) // 2))
        return ex.comp(s, self.subst(max(1, b - 1 - ex_size(s))))

    def __call__(self, max_size=10):
        while True:
            if self.rng.random() < 0.75:
                x = self.term(self.rng.randint(2, max_size))
            else:
                x = self.subst(self.rng.randint(2, max_size))
            if ex_size(x) <= max_size:
                return x


def ex_size(x):
    n = 1
    for c in ex.children(x):
        n += ex_size(c)
    return n


# ---------------------------------------------------------------------------
# lambda terms

def rand_lambda(rng, budget, scope=(), counter=None):
    counter = counter if counter is not None else [0]
    k = rng.random()
    if budget <= 1 or (scope and k < 0.25):
        if scope:
            return LVar(rng.choice(scope))
        counter[0] += 1
        v = "v%d" % counter[0]
        return Abs(v, LVar(v))
    if k < 0.55:
        counter[0] += 1
        v = "v%d" % counter[0]
        return Abs(v, rand_lambda(rng, budget - 1, scope + (v,), counter))
    left = rng.randint(1, budget - 2) if budget > 2 else 1
    return LApp(rand_lambda(rng, left, scope, counter),
                rand_lambda(rng, max(1, budget - 1 - left), scope, counter))


def lambda_size(t):
    if isinstance(t, LVar):
        return 1
    if isinstance(t, Abs):
        return 1 + lambda_size(t.body)
    return 1 + lambda_size(t.fun) + lambda_size(t.arg)


# ---------------------------------------------------------------------------
# first-order rewriting oracle

def rewrites(t, rules):
    """Every one-step reduct of ground tuple t."""
    out = []
    for l, r in rules:
        s = _tmatch(l, t, {})
        if s is not None:
            out.append(t_subst(r, s))
    if t[0] != "v":
        for i, a in enumerate(t[1]):
            for a2 in rewrites(a, rules):
                out.append((t[0], t[1][:i] + (a2,) + t[1][i + 1:]))
    return out


def _tmatch(p, t, s):
    if p[0] == "v":
        if p[1] in s:
            return s if s[p[1]] == t else None
        s = dict(s)
        s[p[1]] = t
        return s
    if t[0] != p[0] or len(t[1]) != len(p[1]):
        return None
    for a, b in zip(p[1], t[1]):
        s = _tmatch(a, b, s)
        if s is None:
            return None
    return s


def normal_forms(t, rules, memo=None):
    """All normal forms reachable from t (exhaustive search)."""
    memo = {} if memo is None else memo
    if t in memo:
        return memo[t]
    memo[t] = frozenset()   # cycle guard; systems here terminate
    nxt = rewrites(t, rules)
    if not nxt:
        res = frozenset([t])
    else:
        res = frozenset().union(*(normal_forms(u, rules, memo) for u in nxt))
    memo[t] = res
    return res


def _unify(a, b, s):
    a, b = _walk(a, s), _walk(b, s)
    if a == b:
        return s
    if a[0] == "v":
        return None if _occurs(a[1], b, s) else {**s, a[1]: b}
    if b[0] == "v":
        return _unify(b, a, s)
    if a[0] != b[0] or len(a[1]) != len(b[1]):
        return None
    for x, y in zip(a[1], b[1]):
        s = _unify(x, y, s)
        if s is None:
            return None
    return s


def _walk(x, s):
    while x[0] == "v" and x[1] in s:
        x = s[x[1]]
    return x


def _occurs(v, t, s):
    t = _walk(t, s)
    if t[0] == "v":
        return t[1] == v
    return any(_occurs(v, a, s) for a in t[1])


def _resolve(x, s):
    x = _walk(x, s)
    if x[0] == "v":
        return x
    return (x[0], tuple(_resolve(a, s) for a in x[1]))


def _rename(x, suffix):
    if x[0] == "v":
        return ("v", x[1] + suffix)
    return (x[0], tuple(_rename(a, suffix) for a in x[1]))


def _positions(x, p=()):
    yield p, x
    if x[0] != "v":
        for i, a in enumerate(x[1]):
            yield from _positions(a, p + (i,))


def _replace(x, p, y):
    if not p:
        return y
    i = p[0]
    args = list(x[1])
    args[i] = _replace(args[i], p[1:], y)
    return (x[0], tuple(args))


def critical_pairs(rules):
    out = []
    for i, (l1, r1) in enumerate(rules):
        for j, (l2, r2) in enumerate(rules):
            l2r, r2r = _rename(l2, "'"), _rename(r2, "'")
            for p, sub in _positions(l1):
                if sub[0] == "v" or (i == j and p == ()):
                    continue
                s = _unify(sub, l2r, {})
                if s is None:
                    continue
                a = _resolve(r1, s)
                b = _resolve(_replace(l1, p, r2r), s)
                out.append((a, b))
    return out


def _ground(x):
    if x[0] == "v":
        return ("c", ())
    return (x[0], tuple(_ground(a) for a in x[1]))


def is_confluent(rules):
    """Terminating systems only: all critical pairs joinable.

    Variables are frozen as the fresh constant c before normalizing.
    """
    for a, b in critical_pairs(rules):
        fa = _freeze(a)
        fb = _freeze(b)
        if normal_forms(fa, rules) != normal_forms(fb, rules) or \
                len(normal_forms(fa, rules)) != 1:
            return False
    return True


def _freeze(x):
    if x[0] == "v":
        return ("#" + x[1], ())
    return (x[0], tuple(_freeze(a) for a in x[1]))


TRS_FUNS = (("f", 1), ("g", 2), ("h", 1))
TRS_CONSTS = ("a", "b")


def rand_trs(rng, max_rules=4):
    """A random size-decreasing (hence terminating) confluent system."""
    while True:
        rules = []
        for _ in range(rng.randint(1, max_rules)):
            for _ in range(50):
                l = rand_fo(rng, 2, ("x", "y"), TRS_CONSTS, TRS_FUNS, 0.35)
                if l[0] == "v" or not l[1] and rng.random() < 0.5:
                    continue
                lv = t_vars(l)
                r = rand_fo(rng, 2, tuple(lv), TRS_CONSTS, TRS_FUNS, 0.5)
                if t_size(r) >= t_size(l) or not _vars_bounded(l, r):
                    continue
                rules.append((l, r))
                break
        if rules and is_confluent(rules):
            return rules


def _count(x, acc):
    if x[0] == "v":
        acc[x[1]] = acc.get(x[1], 0) + 1
    else:
        for a in x[1]:
            _count(a, acc)
    return acc


def _vars_bounded(l, r):
    cl, cr = _count(l, {}), _count(r, {})
    return all(cl.get(v, 0) >= n for v, n in cr.items())


def rand_ground(rng, max_size=8):
    while True:
        t = rand_fo(rng, 3, (), TRS_CONSTS, TRS_FUNS, 0)
        if t_size(t) <= max_size:
            return t
