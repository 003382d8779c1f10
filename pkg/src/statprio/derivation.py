"""Product-based scenario: prune the usage model to one product and walk it."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from itertools import accumulate
from typing import Any

import numpy as np

from .errors import ModelError
from .models import FiniteTrace, Transition, TransitionSystem, UsageModel

GENERATOR = "numpy-PCG64/SeedSequence(seed, walk)"


def prune_usage_model(um: UsageModel, ts: TransitionSystem) -> UsageModel:
    """Restrict ``um`` to the behaviour of ``ts`` and renormalize each row.

    Removed probability mass is spread over the surviving siblings in
    proportion to their weight. States that lose every outgoing transition
    are removed along with the transitions leading to them, until nothing
    changes; unreachable states go last.
    """
    had_out = {t.source for t in um.ts.transitions}
    live = set(um.ts.states & ts.states)
    kept = {t for t in um.ts.transitions if t in ts.transitions}
    while True:
        kept = {t for t in kept if t.source in live and t.target in live}
        mass: dict[str, float] = {}
        for t in kept:
            mass[t.source] = mass.get(t.source, 0.0) + um.prob[t]
        dead = {s for s in live if s in had_out and mass.get(s, 0.0) <= 0.0}
        if not dead:
            break
        if um.initial in dead:
            raise ModelError("INITIAL_DEAD", "no behaviour of the usage model survives for this product")
        live -= dead
    if um.initial not in live:
        raise ModelError("INITIAL_DEAD", "initial state is not part of the product's behaviour")

    reach = {um.initial}
    stack = [um.initial]
    while stack:
        s = stack.pop()
        for t in kept:
            if t.source == s and t.target not in reach:
                reach.add(t.target)
                stack.append(t.target)
    kept = {t for t in kept if t.source in reach}

    prob = {}
    for s in reach:
        row = [t for t in kept if t.source == s]
        lost = any(t not in kept for t in um.ts.outgoing(s))
        total = math.fsum(um.prob[t] for t in row)
        for t in row:
            prob[t] = um.prob[t] / total if lost else um.prob[t]
    new_ts = TransitionSystem(frozenset(reach), frozenset(t.action for t in kept), frozenset(kept), um.initial)
    tau = {s: p for s, p in um.tau.items() if s in reach}
    return UsageModel(new_ts, prob, tau)


@dataclass(frozen=True)
class TestSuite:
    __test__ = False  # not a pytest class

    seed: int
    count: int
    max_len: int
    cases: tuple[FiniteTrace, ...]
    partial: int = 0
    include_partial: bool = False
    generator: str = GENERATOR

    def to_json(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "seed": self.seed,
            "count": self.count,
            "maxLen": self.max_len,
            "generator": self.generator,
            "cases": [list(c.actions) for c in self.cases],
        }
        if self.partial:
            doc["partialWalks"] = self.partial
            doc["partialIncluded"] = self.include_partial
        return doc


def _walk(um: UsageModel, rng: np.random.Generator, max_len: int) -> tuple[FiniteTrace, bool]:
    state = um.initial
    actions: list[str] = []
    prob = 1.0
    while len(actions) < max_len:
        out = um.ts.outgoing(state)
        if not out:
            break
        weights = list(accumulate(um.prob[t] for t in out))
        i = min(bisect.bisect_right(weights, rng.random() * weights[-1]), len(out) - 1)
        t: Transition = out[i]
        actions.append(t.action)
        prob *= um.prob[t]
        state = t.target
        if state == um.initial:
            return FiniteTrace(tuple(actions), prob), True
    return FiniteTrace(tuple(actions), prob), False


def generate_tests(
    um: UsageModel,
    count: int,
    max_len: int,
    seed: int,
    include_partial: bool = False,
) -> TestSuite:
    """Run ``count`` seeded random walks from the initial state.

    A walk stops when it returns to the initial state. Walks cut at
    ``max_len`` transitions (or stuck in a state without successors) are
    partial and left out unless ``include_partial`` is set. Walk ``k`` draws
    from its own stream seeded by ``(seed, k)``, so the suite does not
    depend on how walks are scheduled.
    """
    for name, value in (("count", count), ("max_len", max_len)):
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise ModelError("INVALID_PARAMS", f"{name} must be a positive integer, got {value!r}")
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ModelError("INVALID_PARAMS", f"seed must be a non-negative integer, got {seed!r}")
    cases = []
    partial = 0
    for k in range(count):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, k])))
        trace, complete = _walk(um, rng, max_len)
        if not complete:
            partial += 1
            if not include_partial:
                continue
        cases.append(trace)
    return TestSuite(seed, count, max_len, tuple(cases), partial, include_partial)
