"""Bounded depth-first extraction of i-to-i traces from a usage model."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ModelError
from .models import FiniteTrace, UsageModel

# slack on the inclusive interval test, absorbs rounding in long products
BOUND_EPS = 1e-12


@dataclass(frozen=True)
class SelectionParams:
    l_max: int
    pr_min: float = 0.0
    pr_max: float = 1.0

    def __post_init__(self):
        if isinstance(self.l_max, bool) or not isinstance(self.l_max, int) or self.l_max < 1:
            raise ModelError("INVALID_PARAMS", f"l_max must be a positive integer, got {self.l_max!r}")
        if not 0.0 <= self.pr_min <= self.pr_max <= 1.0:
            raise ModelError("INVALID_PARAMS", f"need 0 <= pr_min <= pr_max <= 1, got [{self.pr_min}, {self.pr_max}]")

    def admits(self, probability: float) -> bool:
        return self.pr_min - BOUND_EPS <= probability <= self.pr_max + BOUND_EPS


@dataclass
class SelectionAudit:
    """Bookkeeping of what the search threw away."""

    pruned_branches: int = 0
    interval_rejected: list[FiniteTrace] = field(default_factory=list)


@dataclass(frozen=True)
class TraceSet:
    traces: tuple[FiniteTrace, ...] = ()

    def __iter__(self):
        return iter(self.traces)

    def __len__(self):
        return len(self.traces)

    def action_sequences(self) -> set[tuple[str, ...]]:
        return {t.actions for t in self.traces}

    @classmethod
    def of(cls, traces) -> "TraceSet":
        """Deduplicate by action sequence (keeping the highest probability) and sort."""
        best: dict[tuple[str, ...], FiniteTrace] = {}
        for t in traces:
            old = best.get(t.actions)
            if old is None or (t.probability or 0.0) > (old.probability or 0.0):
                best[t.actions] = t
        return cls(tuple(best[k] for k in sorted(best)))


def dfs_select(
    um: UsageModel,
    params: SelectionParams,
    *,
    prune: bool = True,
    audit: SelectionAudit | None = None,
) -> TraceSet:
    """Traces that leave the initial state and first come back to it.

    A branch ends the moment it re-enters the initial state, or when it
    would exceed ``params.l_max`` transitions. With ``prune`` set, a branch
    whose running probability already fell below ``pr_min`` is cut early;
    path probabilities never grow, so this changes nothing but the cost.
    """
    init = um.initial
    found: list[FiniteTrace] = []
    rejected: list[FiniteTrace] = []
    pruned = 0
    stack: list[tuple[str, tuple[str, ...], float]] = [(init, (), 1.0)]
    while stack:
        state, actions, prob = stack.pop()
        if len(actions) >= params.l_max:
            continue
        for t in reversed(um.ts.outgoing(state)):
            p = prob * um.prob[t]
            path = actions + (t.action,)
            if t.target == init:
                trace = FiniteTrace(path, p)
                (found if params.admits(p) else rejected).append(trace)
            elif prune and p < params.pr_min - BOUND_EPS:
                pruned += 1
            else:
                stack.append((t.target, path, p))
    if audit is not None:
        audit.pruned_branches += pruned
        audit.interval_rejected.extend(TraceSet.of(rejected).traces)
    return TraceSet.of(found)
