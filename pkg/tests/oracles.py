"""Brute-force reference implementations used only by the tests.

None of these call into the code paths they check: products come from a
truth table over the tree rules, paths from plain recursive enumeration.
"""

from itertools import product

from statprio.expr import evaluate
from statprio.features import GroupKind

EPS = 1e-12


def structurally_valid(d, selected):
    if d.root not in selected:
        return False
    for f in d.features:
        if f.name in selected and f.parent is not None and f.parent not in selected:
            return False
    members = {}
    for f in d.features:
        if f.parent is None:
            continue
        if f.group is GroupKind.MANDATORY and f.parent in selected and f.name not in selected:
            return False
        if f.group in (GroupKind.OR, GroupKind.XOR):
            members.setdefault((f.parent, f.group, f.group_id), []).append(f.name)
    for (parent, kind, _), names in members.items():
        if parent not in selected:
            continue
        on = sum(n in selected for n in names)
        if kind is GroupKind.OR and on < 1:
            return False
        if kind is GroupKind.XOR and on != 1:
            return False
    return all(evaluate(c, selected) for c in d.constraints)


def truth_table_products(d):
    names = [f.name for f in d.features]
    out = set()
    for bits in product((False, True), repeat=len(names)):
        selected = frozenset(n for n, b in zip(names, bits) if b)
        if structurally_valid(d, selected):
            out.add(selected)
    return out


def all_paths(transitions, start, max_len):
    """Every path from ``start`` of 0..max_len transitions, as tuples of transitions."""
    out = [()]
    frontier = [((), start)]
    for _ in range(max_len):
        nxt = []
        for path, state in frontier:
            for t in transitions:
                if t[0] == state:
                    nxt.append((path + (t,), t[2]))
        out.extend(p for p, _ in nxt)
        frontier = nxt
    return out


def brute_force_dfs(um, l_max, pr_min, pr_max):
    """Label sequences of first-return cycles at the initial state, by full enumeration."""
    init = um.initial
    found = {}
    for path in all_paths(sorted(um.ts.transitions), init, l_max):
        if not path or path[-1][2] != init:
            continue
        if any(t[2] == init for t in path[:-1]):
            continue
        p = 1.0
        for t in path:
            p *= um.prob[t]
        if pr_min - EPS <= p <= pr_max + EPS:
            labels = tuple(t[1] for t in path)
            found[labels] = max(found.get(labels, 0.0), p)
    return found


def runs(transitions, init, actions):
    """Does some path from init carry exactly these labels."""
    current = {init}
    for a in actions:
        current = {t[2] for t in transitions for s in current if t[0] == s and t[1] == a}
    return bool(current)


def products_running(fts, products, actions):
    return {
        p for p in products
        if runs([t for t in fts.ts.transitions if evaluate(fts.gamma[t], p)], fts.initial, actions)
    }


def label_sequences(transitions, init, max_len):
    return {tuple(t[1] for t in path) for path in all_paths(sorted(transitions), init, max_len)}


def random_expr(rng, names, depth=3):
    """A random feature expression drawn from ``rng`` (a random.Random)."""
    from statprio.expr import FALSE, TRUE, And, Not, Or, Var

    if depth == 0 or rng.random() < 0.3:
        return rng.choice([Var(n) for n in names] + [TRUE, FALSE])
    kind = rng.choice(["not", "and", "or"])
    if kind == "not":
        return Not(random_expr(rng, names, depth - 1))
    args = tuple(random_expr(rng, names, depth - 1) for _ in range(rng.randint(2, 3)))
    return And(args) if kind == "and" else Or(args)
