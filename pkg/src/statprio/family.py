"""Family-based filtering of traces through an FTS and product prioritization."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable, Sequence

from .errors import ModelError
from .expr import TRUE, Expr, conj, disj, to_string
from .features import Product, canonical, is_satisfiable, sat_products
from .models import FeaturedTransitionSystem, FiniteTrace, Transition, TransitionSystem
from .selection import TraceSet

PrunedFts = FeaturedTransitionSystem


class Order(str, Enum):
    ASC = "ASC"
    DESC = "DESC"


def _actions(trace: FiniteTrace | Sequence[str]) -> tuple[str, ...]:
    return trace.actions if isinstance(trace, FiniteTrace) else tuple(trace)


def matching_paths(fts: FeaturedTransitionSystem, trace: FiniteTrace | Sequence[str]) -> list[tuple[tuple[Transition, ...], Expr]]:
    """Paths labelled by the trace whose guards some valid product satisfies.

    Each entry is (transitions along the path, conjunction of their guards).
    A partial path is dropped as soon as its running guard becomes unsatisfiable.
    """
    actions = _actions(trace)
    d = fts.diagram
    results = []
    stack = [(fts.initial, 0, (), TRUE)]
    while stack:
        state, k, path, guard = stack.pop()
        if k == len(actions):
            results.append((path, guard))
            continue
        for t in fts.ts.outgoing(state):
            if t.action != actions[k]:
                continue
            g = conj(guard, fts.gamma[t])
            if g != guard and not is_satisfiable(d, g):
                continue
            stack.append((t.target, k + 1, path + (t,), g))
    results.sort(key=lambda item: item[0])
    return results


def accept(fts: FeaturedTransitionSystem, trace: FiniteTrace | Sequence[str]) -> bool:
    """Whether at least one valid product can execute the trace."""
    return bool(matching_paths(fts, trace))


def build_fts_prime(fts: FeaturedTransitionSystem, traces: Iterable[FiniteTrace]) -> tuple[PrunedFts, TraceSet]:
    """Keep the behaviour of the accepted traces only; drop the rejected traces.

    The pruned FTS starts from the initial state alone and grows by the
    states, actions and transitions visited by every satisfiable path of
    each accepted trace, with guards copied from ``fts``.
    """
    states = {fts.initial}
    actions: set[str] = set()
    transitions: set[Transition] = set()
    kept = []
    for trace in traces:
        paths = matching_paths(fts, trace)
        if not paths:
            continue
        kept.append(trace)
        actions.update(_actions(trace))
        for path, _ in paths:
            transitions.update(path)
            states.update(t.target for t in path)
    ts = TransitionSystem(frozenset(states), frozenset(actions), frozenset(transitions), fts.initial)
    gamma = {t: fts.gamma[t] for t in transitions}
    return FeaturedTransitionSystem(ts, fts.diagram, gamma), TraceSet(tuple(kept))


def is_substructure(pruned: FeaturedTransitionSystem, source: FeaturedTransitionSystem) -> bool:
    return (
        pruned.initial == source.initial
        and pruned.diagram == source.diagram
        and pruned.ts.states <= source.ts.states
        and pruned.ts.actions <= source.ts.actions
        and pruned.ts.transitions <= source.ts.transitions
        and all(pruned.gamma[t] == source.gamma[t] for t in pruned.ts.transitions)
    )


def products_for_trace(fts_prime: PrunedFts, trace: FiniteTrace | Sequence[str]) -> tuple[Expr, frozenset[Product]]:
    """Guard of the trace and the products satisfying it together with the diagram.

    With several satisfiable matching paths the guard is the disjunction of
    the per-path conjunctions.
    """
    paths = matching_paths(fts_prime, trace)
    if not paths:
        raise ModelError("TRACE_REJECTED", f"{_actions(trace)} cannot be executed by any product")
    guard = disj(*(g for _, g in paths))
    products = sat_products(fts_prime.diagram, guard)
    assert products, "accepted trace with no product"
    return guard, products


@dataclass(frozen=True)
class PrioritizedEntry:
    trace: FiniteTrace
    probability: float
    guard: Expr
    products: frozenset[Product]


@dataclass(frozen=True)
class PrioritizedReport:
    order: Order
    entries: tuple[PrioritizedEntry, ...]

    def to_json(self, fmt=float) -> dict[str, Any]:
        return {
            "order": self.order.value,
            "entries": [
                {
                    "trace": list(e.trace.actions),
                    "probability": fmt(e.probability),
                    "guard": to_string(e.guard),
                    "products": canonical(e.products),
                }
                for e in self.entries
            ],
        }


def prioritize(fts_prime: PrunedFts, traces: Iterable[FiniteTrace], order: Order | str = Order.DESC) -> PrioritizedReport:
    """Rank traces (and the products able to run them) by probability."""
    order = Order(order)
    entries = []
    for trace in traces:
        if trace.probability is None:
            raise ModelError("INVALID_PARAMS", f"trace {trace.actions} carries no probability")
        guard, products = products_for_trace(fts_prime, trace)
        entries.append(PrioritizedEntry(trace, trace.probability, guard, products))
    if order is Order.DESC:
        entries.sort(key=lambda e: (-e.probability, e.trace.actions))
    else:
        entries.sort(key=lambda e: (e.probability, e.trace.actions))
    return PrioritizedReport(order, tuple(entries))
