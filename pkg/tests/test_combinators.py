import random

import pytest

from rhocalc.terms import Set, App, Signature, free_vars, EMPTY
from rhocalc import combinators as C
from rhocalc.evaluator import normalize, step, ReductionConfig
from rhocalc.subst import alpha_equal
from rhocalc.syntax import parse_term as P, show

from helpers import rand_fo, from_tuple


def ev(t, gate="confstratlin", steps=20000):
    t = P(t) if isinstance(t, str) else t
    r = normalize(t, ReductionConfig(gate=gate, max_steps=steps))
    assert r.normal
    return r.term


@pytest.mark.parametrize("builder", [C.make_id, C.make_fail, C.make_fixpoint])
def test_builders_closed(builder):
    assert free_vars(builder()) == frozenset()


def test_fresh_binders_per_instance():
    assert C.make_id() != C.make_id()
    assert alpha_equal(C.make_id(), C.make_id())


def test_basic():
    for s in ("a", "f(a, b)", "x -> f(x)"):
        assert alpha_equal(ev(App(C.make_id(), P(s))), Set([P(s)]))
    assert ev(App(C.make_fail(), P("a"))) == EMPTY
    assert ev("[try(a -> b)](c)") == P("{c}")
    assert ev("[try(a -> b)](a)") == P("{b}")
    assert ev("[seq(a -> b, b -> c)](a)") == P("{c}")
    with pytest.raises(ValueError):
        C.make_basic("Nope")


def test_traversals():
    assert ev("[psi(a -> b)](c)") == P("{c}")
    assert ev("[phi(a -> b)](c)") == EMPTY
    assert ev("[psi(a -> b)](f(a, a))") == P("{f(b, b)}")
    assert ev("[phi(a -> b)](f(b, a))") == P("{f(b, b)}")


def test_traversal_expansion_matches_native():
    sig = Signature({"f": 2, "g": 1, "a": 0, "b": 0})
    r = P("a -> b")
    for kind in ("Phi", "Psi"):
        native = C.make_traverse(kind, r)
        expanded = C.make_traverse(kind, r, sig, expand=True)
        for s in ("f(a, b)", "g(a)", "f(b, b)"):
            assert ev(App(native, P(s))) == ev(App(expanded, P(s))), (kind, s)
    with pytest.raises(ValueError):
        C.make_traverse("Psi", r, Signature(), expand=True)


def test_fixpoint_unfolds():
    th, g = C.make_fixpoint(), P("u -> v -> v")
    want = Set([App(g, App(th, g))])
    t = App(th, g)
    cfg = ReductionConfig(gate="none")
    for _ in range(6):
        if alpha_equal(t, want):
            break
        t = step(t, cfg)[0]
    assert alpha_equal(t, want)


@pytest.mark.parametrize("src, want", [
    ("[bottomup(a -> b)](g(a))", "{g(b)}"),
    ("[topdown(a -> b)](f(a, g(a)))", "{f(b, g(b))}"),
    ("[oncebu(a -> b)](f(a, g(a)))", "{f(b, g(a))}"),
    ("[oncetd(a -> b)](f(a, g(a)))", "{f(b, g(a))}"),
    ("[repeat*({a -> b, b -> c})](a)", "{c}"),
    ("[im({a -> b, f(x, g(x)) -> x})](f(a, g(a)))", "{b}"),
    ("[om({a -> b, a -> c, f(x, x) -> x})](f(a, a))", "{b, c}"),
])
def test_recursors(src, want):
    assert ev(src) == P(want)


def test_repeat_never_empty_on_ground():
    rng = random.Random(5)
    rs = Set([P("a -> b"), P("f(x) -> x")])
    for _ in range(15):
        t = from_tuple(rand_fo(rng, 2))
        out = ev(App(C.make_recursor("RepeatStar", rs), t))
        assert out != EMPTY, show(t)


def test_normalizer_rejects_non_rules():
    with pytest.raises(ValueError):
        C.make_im(Set([P("a -> b"), P("c")]))


def test_conditional_needs_true():
    sig = Signature({"f": 1, "g": 1, "a": 0})
    with pytest.raises(ValueError):
        C.make_IM([(P("f(x)"), P("g(x)"), P("x"))], sig=sig)
