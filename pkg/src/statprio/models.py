"""Transition systems, featured transition systems and DTMC usage models."""

from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, NamedTuple, Sequence

from .errors import ModelError
from .expr import TRUE, Expr, evaluate, parse_expr, to_string, variables
from .features import FeatureDiagram

STOCHASTIC_EPS = 1e-9


class Transition(NamedTuple):
    source: str
    action: str
    target: str


@dataclass(frozen=True)
class TransitionSystem:
    states: frozenset[str]
    actions: frozenset[str]
    transitions: frozenset[Transition]
    initial: str
    _out: Mapping[str, tuple[Transition, ...]] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "actions", frozenset(self.actions))
        object.__setattr__(self, "transitions", frozenset(Transition(*t) for t in self.transitions))
        if self.initial not in self.states:
            raise ModelError("INVALID_MODEL", f"initial state {self.initial!r} not among the states")
        out: dict[str, list[Transition]] = defaultdict(list)
        for t in self.transitions:
            if t.source not in self.states or t.target not in self.states:
                raise ModelError("INVALID_MODEL", f"transition {t} leaves the state set")
            if t.action not in self.actions:
                raise ModelError("INVALID_MODEL", f"transition {t} uses undeclared action")
            out[t.source].append(t)
        object.__setattr__(self, "_out", {s: tuple(sorted(ts)) for s, ts in out.items()})

    def outgoing(self, state: str) -> tuple[Transition, ...]:
        """Outgoing transitions of ``state``, sorted by (source, action, target)."""
        return self._out.get(state, ())


@dataclass(frozen=True)
class FeaturedTransitionSystem:
    ts: TransitionSystem
    diagram: FeatureDiagram
    gamma: Mapping[Transition, Expr]

    def __post_init__(self):
        gamma = {Transition(*t): e for t, e in self.gamma.items()}
        missing = self.ts.transitions - gamma.keys()
        if missing:
            raise ModelError("INVALID_MODEL", f"no feature expression for {sorted(missing)}")
        extra = gamma.keys() - self.ts.transitions
        if extra:
            raise ModelError("INVALID_MODEL", f"feature expression for unknown transitions {sorted(extra)}")
        names = set(self.diagram.names)
        for t, e in gamma.items():
            unknown = variables(e) - names
            if unknown:
                raise ModelError("UNKNOWN_FEATURE", f"guard of {t} names {sorted(unknown)}")
        object.__setattr__(self, "gamma", gamma)

    @property
    def initial(self) -> str:
        return self.ts.initial


@dataclass(frozen=True)
class UsageModel:
    """A DTMC whose probabilities live on (source, action, target) triples.

    Construction checks structure only; stochasticity and the initial
    distribution are reported by :func:`usage_model_violations`.
    """

    ts: TransitionSystem
    prob: Mapping[Transition, float]
    tau: Mapping[str, float]

    def __post_init__(self):
        prob = {Transition(*t): float(p) for t, p in self.prob.items()}
        if prob.keys() != self.ts.transitions:
            raise ModelError("INVALID_MODEL", "probabilities must be given for exactly the transitions")
        for t, p in prob.items():
            if not 0.0 <= p <= 1.0:
                raise ModelError("INVALID_MODEL", f"probability {p} of {t} outside [0, 1]")
        tau = {s: float(p) for s, p in self.tau.items()}
        if not tau.keys() <= self.ts.states:
            raise ModelError("INVALID_MODEL", f"initial distribution names unknown states {sorted(tau.keys() - self.ts.states)}")
        object.__setattr__(self, "prob", prob)
        object.__setattr__(self, "tau", tau)

    @property
    def initial(self) -> str:
        return self.ts.initial

    def pair_probability(self, source: str, target: str) -> float:
        """Matrix view: summed probability of every transition from source to target."""
        return math.fsum(self.prob[t] for t in self.ts.outgoing(source) if t.target == target)


@dataclass(frozen=True)
class FiniteTrace:
    actions: tuple[str, ...]
    probability: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))

    def __len__(self):
        return len(self.actions)


@dataclass(frozen=True)
class Violation:
    code: str
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations

    def codes(self) -> list[str]:
        return [v.code for v in self.violations]

    def to_json(self) -> dict[str, Any]:
        return {"valid": self.valid, "violations": [{"code": v.code, "detail": v.detail} for v in self.violations]}


def usage_model_violations(um: UsageModel, eps: float = STOCHASTIC_EPS) -> list[Violation]:
    """Initial-distribution and row-stochasticity problems of a usage model."""
    found = []
    ones = [s for s, p in um.tau.items() if p == 1.0]
    others = [s for s, p in um.tau.items() if p != 1.0 and p != 0.0]
    if len(ones) != 1 or others:
        found.append(Violation("BAD_TAU", f"initial distribution must put 1 on one state, got {dict(sorted(um.tau.items()))}"))
    elif ones[0] != um.initial:
        found.append(Violation("BAD_TAU", f"tau is 1 on {ones[0]!r} but the initial state is {um.initial!r}"))
    for s in sorted(um.ts.states):
        out = um.ts.outgoing(s)
        if out:
            total = math.fsum(um.prob[t] for t in out)
            if abs(total - 1.0) > eps:
                found.append(Violation("NOT_STOCHASTIC", f"state {s!r}: outgoing probabilities sum to {total!r}"))
    return found


def validate_triple(d: FeatureDiagram, fts: FeaturedTransitionSystem, um: UsageModel) -> ValidationReport:
    """Check that the three models fit together; every violation is reported."""
    found: list[Violation] = []
    if fts.diagram != d:
        found.append(Violation("FD_MISMATCH", "the FTS is not defined over the given feature diagram"))
    for code, mine, theirs in (
        ("STATE_NOT_SUBSET", um.ts.states, fts.ts.states),
        ("ACT_NOT_SUBSET", um.ts.actions, fts.ts.actions),
        ("TRANS_NOT_SUBSET", um.ts.transitions, fts.ts.transitions),
    ):
        for item in sorted(mine - theirs):
            found.append(Violation(code, f"{item!r} is in the usage model but not in the FTS"))
    if um.tau.get(fts.initial, 0.0) != 1.0:
        found.append(Violation("INITIAL_MISMATCH", f"tau({fts.initial!r}) = {um.tau.get(fts.initial, 0.0)!r}, expected 1"))
    found.extend(usage_model_violations(um))
    return ValidationReport(tuple(found))


def project(fts: FeaturedTransitionSystem, product: Iterable[str], prune_unreachable: bool = True) -> TransitionSystem:
    """The plain transition system of one product (fts|p)."""
    p = frozenset(product)
    if not fts.diagram.is_valid(p):
        raise ModelError("INVALID_PRODUCT", f"{sorted(p)} is not a product of the diagram")
    kept = [t for t in fts.ts.transitions if evaluate(fts.gamma[t], p)]
    if not prune_unreachable:
        return TransitionSystem(fts.ts.states, fts.ts.actions, frozenset(kept), fts.initial)
    succ: dict[str, list[str]] = defaultdict(list)
    for t in kept:
        succ[t.source].append(t.target)
    reach = {fts.initial}
    stack = [fts.initial]
    while stack:
        for nxt in succ[stack.pop()]:
            if nxt not in reach:
                reach.add(nxt)
                stack.append(nxt)
    kept = [t for t in kept if t.source in reach]
    return TransitionSystem(frozenset(reach), frozenset(t.action for t in kept), frozenset(kept), fts.initial)


def execute_trace(ts: TransitionSystem, trace: FiniteTrace | Sequence[str]) -> bool:
    """Whether some path from the initial state is labelled exactly by the trace."""
    actions = trace.actions if isinstance(trace, FiniteTrace) else tuple(trace)
    current = {ts.initial}
    for action in actions:
        current = {t.target for s in current for t in ts.outgoing(s) if t.action == action}
        if not current:
            return False
    return True


def trace_probability(um: UsageModel, trace: FiniteTrace | Sequence[str]) -> float:
    """Product of transition probabilities along the trace's path.

    Under nondeterministic labels the most probable matching path is used.
    """
    actions = trace.actions if isinstance(trace, FiniteTrace) else tuple(trace)
    best = {um.initial: 1.0}
    for action in actions:
        nxt: dict[str, float] = {}
        for s, p in best.items():
            for t in um.ts.outgoing(s):
                if t.action == action:
                    q = p * um.prob[t]
                    if q > nxt.get(t.target, -1.0):
                        nxt[t.target] = q
        if not nxt:
            raise ModelError("NO_SUCH_PATH", f"{actions} is not executable in the usage model")
        best = nxt
    return max(best.values())


# -- JSON interchange ---------------------------------------------------------

def _load(document: str | Mapping[str, Any]) -> Mapping[str, Any]:
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ModelError("SYNTAX", str(exc)) from exc
    if not isinstance(document, Mapping):
        raise ModelError("SYNTAX", "model document must be a JSON object")
    return document


def _ts_from_json(doc: Mapping[str, Any], extra_key: str) -> tuple[TransitionSystem, dict[Transition, Any]]:
    try:
        initial = str(doc["initial"])
        raw = doc["transitions"]
        transitions = {}
        for entry in raw:
            t = Transition(str(entry["from"]), entry["action"], str(entry["to"]))
            if not isinstance(t.action, str):
                raise ModelError("SYNTAX", f"action of {entry!r} must be a string")
            if t in transitions:
                raise ModelError("INVALID_MODEL", f"duplicate transition {t}")
            transitions[t] = entry.get(extra_key)
        states = {str(s) for s in doc.get("states", ())} | {initial}
    except (KeyError, TypeError) as exc:
        raise ModelError("SYNTAX", f"malformed transition system: {exc!r}") from exc
    states |= {t.source for t in transitions} | {t.target for t in transitions}
    actions = {t.action for t in transitions} | set(doc.get("actions", ()))
    return TransitionSystem(frozenset(states), frozenset(actions), frozenset(transitions), initial), transitions


def parse_fts(document: str | Mapping[str, Any], diagram: FeatureDiagram) -> FeaturedTransitionSystem:
    doc = _load(document)
    ts, guards = _ts_from_json(doc, "guard")
    gamma = {t: TRUE if g is None else parse_expr(g) for t, g in guards.items()}
    return FeaturedTransitionSystem(ts, diagram, gamma)


def parse_usage_model(document: str | Mapping[str, Any]) -> UsageModel:
    doc = _load(document)
    ts, probs = _ts_from_json(doc, "p")
    for t, p in probs.items():
        if isinstance(p, bool) or not isinstance(p, (int, float)):
            raise ModelError("SYNTAX", f"transition {t} needs a numeric 'p'")
    tau = doc.get("initialProb", {ts.initial: 1.0})
    if not isinstance(tau, Mapping):
        raise ModelError("SYNTAX", "'initialProb' must be an object")
    return UsageModel(ts, probs, {str(s): p for s, p in tau.items()})


def _transitions_json(ts: TransitionSystem) -> list[dict[str, Any]]:
    return [{"from": t.source, "action": t.action, "to": t.target} for t in sorted(ts.transitions)]


def fts_to_json(fts: FeaturedTransitionSystem) -> dict[str, Any]:
    rows = _transitions_json(fts.ts)
    for row, t in zip(rows, sorted(fts.ts.transitions)):
        row["guard"] = to_string(fts.gamma[t])
    return {"initial": fts.initial, "states": sorted(fts.ts.states), "transitions": rows}


def usage_model_to_json(um: UsageModel, fmt=float) -> dict[str, Any]:
    rows = _transitions_json(um.ts)
    for row, t in zip(rows, sorted(um.ts.transitions)):
        row["p"] = fmt(um.prob[t])
    return {
        "initial": um.initial,
        "states": sorted(um.ts.states),
        "transitions": rows,
        "initialProb": {s: fmt(p) for s, p in sorted(um.tau.items())},
    }

