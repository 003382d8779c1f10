"""Hypothesis strategies for random diagrams, expressions and usage models."""

from hypothesis import strategies as st

from statprio.expr import FALSE, TRUE, And, Not, Or, Var
from statprio.features import Feature, FeatureDiagram, GroupKind
from statprio.models import Transition, TransitionSystem, UsageModel


def expressions(names, max_leaves=6):
    leaves = st.sampled_from([Var(n) for n in names] + [TRUE, FALSE])
    return st.recursive(
        leaves,
        lambda inner: st.one_of(
            inner.map(Not),
            st.lists(inner, min_size=2, max_size=3).map(lambda xs: And(tuple(xs))),
            st.lists(inner, min_size=2, max_size=3).map(lambda xs: Or(tuple(xs))),
        ),
        max_leaves=max_leaves,
    )


@st.composite
def diagrams(draw, max_features=8, constraints=True):
    n = draw(st.integers(1, max_features))
    names = [f"f{i}" for i in range(n)]
    features = [Feature(names[0])]
    for i in range(1, n):
        parent = names[draw(st.integers(0, i - 1))]
        kind = draw(st.sampled_from(list(GroupKind)))
        features.append(Feature(names[i], parent, kind, draw(st.integers(0, 1))))
    cons = ()
    if constraints:
        cons = tuple(draw(st.lists(expressions(names, 4), max_size=2)))
    return FeatureDiagram(names[0], tuple(features), cons)


@st.composite
def usage_models(draw, max_states=5):
    n = draw(st.integers(1, max_states))
    states = [str(i) for i in range(1, n + 1)]
    actions = ["a", "b", "c"]
    transitions = set()
    for s in states:
        k = draw(st.integers(0 if s != "1" else 1, 3))
        for _ in range(k):
            transitions.add(Transition(s, draw(st.sampled_from(actions)), draw(st.sampled_from(states))))
    prob = {}
    for s in states:
        row = sorted(t for t in transitions if t.source == s)
        if not row:
            continue
        weights = [draw(st.integers(1, 9)) for _ in row]
        for t, w in zip(row, weights):
            prob[t] = w / sum(weights)
    ts = TransitionSystem(frozenset(states), frozenset(actions), frozenset(transitions), "1")
    return UsageModel(ts, prob, {"1": 1.0})
