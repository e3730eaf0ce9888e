import random

import pytest
from hypothesis import given, settings, strategies as st

from rhocalc.terms import EMPTY
from rhocalc.evaluator import (ReductionConfig, step, normalize, head_redex,
                               reduction_graph, default_max_steps, CORE)
from rhocalc.subst import alpha_equal
from rhocalc.syntax import parse_term as P, show

from helpers import RhoGen


def nf(src, gate="confstrat", **kw):
    r = normalize(P(src), ReductionConfig(gate=gate, **kw))
    assert r.normal
    return r.term


def test_head_redex_names():
    assert head_redex(P("[a -> b](a)")) == "Fire"
    assert head_redex(P("[f(u)](g(v))")) == "Congruence_fail"
    assert head_redex(P("{a, {b}}")) == "Flat"
    assert head_redex(P("f(a)")) is None


def test_single_steps():
    t2, info = step(P("[a -> b](a)"))
    assert t2 == P("{b}") and info.rule_name == "Fire" and info.position == ()
    t2, info = step(P("[f(a) -> f(b)](f(c))"))
    assert t2 == EMPTY and info.rule_name == "Fire"
    t2, info = step(P("[f(a -> b)](f(a))"))
    assert t2 == P("{f([a -> b](a))}") and info.rule_name == "Congruence"
    assert step(P("f(a, b)")) is None


@pytest.mark.parametrize("src, want", [
    ("[x -> f(x)]([y -> y](a))", "{f(a)}"),
    ("[{a -> b, a -> c}](a)", "{b, c}"),
    ("g([a -> b](c), [a -> b](a))", "{}"),
    ("[a -> b]({a, b})", "{b}"),
    ("[x -> y -> x](a)", "{y -> a}"),
])
def test_normal_forms(src, want):
    assert alpha_equal(nf(src), P(want))


def test_gate_changes_result():
    # the argument fails, but an unguarded Fire discards it first
    assert nf("[x -> b]([a -> b](b))", "none") == P("{b}")
    assert nf("[x -> b]([a -> b](b))", "confstrat") == EMPTY


def test_rule_bodies_reduced_last():
    # no weak redex outside the rule, so the body is reduced, then Switch_R
    assert nf("x -> [a -> b](a)") == P("{x -> b}")


def test_step_limit_and_trace():
    r = normalize(P("[repeat*({a -> b, b -> c})](a)"),
                  ReductionConfig(gate="confstratlin", max_steps=3, trace=True))
    assert r.kind == "StepLimit" and r.steps == 3 and len(r.trace) == 3
    line = r.trace[0].line(1)
    assert line.startswith("step 1: ") and " ==> " in line


def test_max_steps_env(monkeypatch):
    monkeypatch.setenv("RHO_MAX_STEPS", "17")
    assert default_max_steps() == 17
    assert ReductionConfig().max_steps == 17
    monkeypatch.setenv("RHO_MAX_STEPS", "junk")
    assert default_max_steps() == 10000
    with pytest.raises(ValueError):
        ReductionConfig(max_steps=0)


def test_core_rule_set_disables_first():
    r = normalize(P("[first(a -> b)](a)"), ReductionConfig(rule_set=CORE))
    assert r.term == P("[first(a -> b)](a)")


def test_fun_first_order():
    t = P("[[x -> y -> x](a)]([u -> u](b))")
    cfg = ReductionConfig(gate="none", fun_first=True, trace=True)
    r = normalize(t, cfg)
    seen = [i.position for i in r.trace]
    assert seen[0] == (1,)       # function part first
    assert alpha_equal(r.term, P("{a}"))


# -- reduction graphs ------------------------------------------------------

def test_graph_small():
    g = reduction_graph(P("[a -> b](a)"), "none")
    assert len(g.nodes) == 2 and len(g.edges) == 1
    assert g.normal_forms() == [P("{b}")]
    dot = g.to_dot()
    assert dot.startswith("digraph rho {") and 'label="Fire"' in dot


def test_graph_non_confluent_example():
    t = P("[f(x) -> f(x)]({f(a)})")
    loose = {show(n) for n in reduction_graph(t, "none").normal_forms()}
    assert loose == {"{}", "{f(a)}"}
    tight = reduction_graph(t, "confstrat", depth_limit=6).normal_forms()
    assert len(tight) == 1


def test_graph_limits():
    t = P("[repeat*({a -> b, b -> c})](a)")
    g = reduction_graph(t, "confstratlin", node_limit=50, depth_limit=4)
    assert g.truncated and len(g.nodes) <= 50
    assert g.frontier()


def test_dc_branches():
    g = reduction_graph(P("[dc(a -> b, a -> c)](a)"), "confstrat")
    assert {show(n) for n in g.normal_forms()} == {"{b}", "{c}"}


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_deterministic_run_is_a_graph_path(seed):
    """The deterministic normal form shows up among the graph's leaves."""
    t = RhoGen(random.Random(seed), 8)()
    r = normalize(t, ReductionConfig(gate="confstrat", max_steps=6))
    if not r.normal:
        return
    g = reduction_graph(t, "confstrat", depth_limit=6)
    assert any(alpha_equal(n, r.term) for n in g.normal_forms())
