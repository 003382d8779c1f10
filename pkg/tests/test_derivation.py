import math
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chisquare

from statprio.derivation import generate_tests, prune_usage_model
from statprio.errors import ModelError
from statprio.models import (
    Transition,
    TransitionSystem,
    UsageModel,
    execute_trace,
    project,
    trace_probability,
    usage_model_violations,
)

from oracles import truth_table_products
from strategies import usage_models

FREE_TEA = {"v", "b", "cur", "t", "c", "eur", "f"}
FREE_TEA_CYCLE = ("free", "tea", "serveTea", "take")


@pytest.fixture(scope="module")
def free_tea(fts, um):
    return prune_usage_model(um, project(fts, FREE_TEA))


def rows(um):
    return {s: {(t.action, t.target): um.prob[t] for t in um.ts.outgoing(s)} for s in um.ts.states}


def test_pruned_free_tea_model(free_tea):
    assert rows(free_tea) == {
        "1": {("free", "3"): 1.0},
        "3": {("cancel", "4"): 0.1, ("tea", "6"): 0.9},
        "4": {("return", "1"): 1.0},
        "6": {("serveTea", "7"): 1.0},
        "7": {("take", "1"): 1.0},
    }
    assert not usage_model_violations(free_tea)
    assert trace_probability(free_tea, FREE_TEA_CYCLE) == pytest.approx(0.9, abs=1e-12)


def test_identity_pruning(um):
    assert prune_usage_model(um, um.ts) == um


def test_initial_dead(um):
    ts = TransitionSystem(frozenset({"1", "2"}), frozenset({"pay"}), frozenset({("1", "pay", "2")}), "1")
    with pytest.raises(ModelError) as err:
        prune_usage_model(um, ts)
    assert err.value.code == "INITIAL_DEAD"


def test_dead_state_cascades():
    ts = TransitionSystem(frozenset("1234"), frozenset("abcd"), frozenset({
        ("1", "a", "2"), ("1", "b", "3"), ("2", "c", "4"), ("3", "d", "1"), ("4", "d", "1")}), "1")
    um = UsageModel(ts, {("1", "a", "2"): 0.25, ("1", "b", "3"): 0.75, ("2", "c", "4"): 1.0,
                         ("3", "d", "1"): 1.0, ("4", "d", "1"): 1.0}, {"1": 1.0})
    keep = TransitionSystem(ts.states, ts.actions, ts.transitions - {Transition("4", "d", "1")}, "1")
    out = prune_usage_model(um, keep)
    assert out.ts.states == {"1", "3"}
    assert rows(out)["1"] == {("b", "3"): 1.0}


def test_every_product_prunes_to_a_stochastic_model(fd, fts, um):
    for p in truth_table_products(fd):
        try:
            pruned = prune_usage_model(um, project(fts, p))
        except ModelError as err:
            assert err.code == "INITIAL_DEAD"
            continue
        assert not usage_model_violations(pruned)
        assert_ratios_kept(um, pruned)


def assert_ratios_kept(um, pruned):
    for s in pruned.ts.states:
        out = pruned.ts.outgoing(s)
        for a in out:
            for b in out:
                assert pruned.prob[a] / pruned.prob[b] == pytest.approx(um.prob[a] / um.prob[b], abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(usage_models(), st.data())
def test_random_pruning(um, data):
    drop = data.draw(st.sets(st.sampled_from(sorted(um.ts.transitions))))
    ts = TransitionSystem(um.ts.states, um.ts.actions, um.ts.transitions - drop, um.initial)
    try:
        pruned = prune_usage_model(um, ts)
    except ModelError as err:
        assert err.code == "INITIAL_DEAD"
        return
    assert not usage_model_violations(pruned)
    assert pruned.ts.transitions <= ts.transitions
    assert_ratios_kept(um, pruned)


def test_deterministic_chain_walks():
    ts = TransitionSystem(frozenset("123"), frozenset("abc"),
                          frozenset({("1", "a", "2"), ("2", "b", "3"), ("3", "c", "1")}), "1")
    um = UsageModel(ts, {t: 1.0 for t in ts.transitions}, {"1": 1.0})
    suite = generate_tests(um, 20, 5, seed=3)
    assert {c.actions for c in suite.cases} == {("a", "b", "c")}
    assert len(suite.cases) == 20


def test_free_tea_frequency(free_tea):
    suite = generate_tests(free_tea, 1000, 10, seed=42)
    p = trace_probability(free_tea, FREE_TEA_CYCLE)
    freq = sum(c.actions == FREE_TEA_CYCLE for c in suite.cases) / len(suite.cases)
    assert abs(freq - p) <= 3 * math.sqrt(p * (1 - p) / len(suite.cases))


def test_same_seed_same_suite(free_tea):
    a = generate_tests(free_tea, 50, 10, seed=7)
    assert a == generate_tests(free_tea, 50, 10, seed=7)
    assert a.to_json()["cases"] != generate_tests(free_tea, 50, 10, seed=8).to_json()["cases"]
    assert a.generator.startswith("numpy-PCG64")


def test_partial_walks(um):
    suite = generate_tests(um, 200, 3, seed=1)
    assert suite.partial > 0
    assert all(len(c) <= 3 and c.actions[-1] == "return" for c in suite.cases)
    with_partial = generate_tests(um, 200, 3, seed=1, include_partial=True)
    assert len(with_partial.cases) == 200
    assert with_partial.to_json()["partialIncluded"] is True


@pytest.mark.parametrize("count, max_len, seed", [(0, 5, 1), (5, 0, 1), (5, 5, -1), (1.5, 5, 1)])
def test_invalid_generation_params(free_tea, count, max_len, seed):
    with pytest.raises(ModelError) as err:
        generate_tests(free_tea, count, max_len, seed)
    assert err.value.code == "INVALID_PARAMS"


def test_generated_cases_are_first_return_cycles(free_tea, um):
    for model in (free_tea, um):
        for case in generate_tests(model, 300, 12, seed=5).cases:
            assert execute_trace(model.ts, case)
            state = model.initial
            for i, a in enumerate(case.actions):
                (t,) = [t for t in model.ts.outgoing(state) if t.action == a]
                state = t.target
                assert (state == model.initial) == (i == len(case) - 1)


def transition_counts(um, suite):
    counts = Counter()
    for case in suite.cases:
        state = um.initial
        for a in case.actions:
            (t,) = [t for t in um.ts.outgoing(state) if t.action == a]
            counts[t] += 1
            state = t.target
    return counts


def test_transition_frequencies_fit_the_model(um):
    suite = generate_tests(um, 10_000, 50, seed=11)
    counts = transition_counts(um, suite)
    for s in sorted(um.ts.states):
        out = um.ts.outgoing(s)
        if len(out) < 2:
            continue
        observed = [counts[t] for t in out]
        expected = [sum(observed) * um.prob[t] for t in out]
        assert chisquare(observed, expected).pvalue > 0.01
