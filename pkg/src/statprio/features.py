"""Feature diagrams, their propositional semantics, and product queries."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from itertools import combinations
from typing import Any, Iterable, Mapping

from . import sat
from .errors import ModelError
from .expr import (
    IDENTIFIER,
    TRUE,
    Expr,
    Var,
    conj,
    disj,
    evaluate,
    implies,
    neg,
    parse_expr,
    to_string,
    variables,
)

Product = frozenset  # frozenset[str] of selected feature names

DEFAULT_ENUMERATION_CAP = 30


class GroupKind(str, Enum):
    MANDATORY = "MANDATORY"
    OPTIONAL = "OPTIONAL"
    OR = "OR"
    XOR = "XOR"


@dataclass(frozen=True)
class Feature:
    name: str
    parent: str | None = None
    group: GroupKind = GroupKind.OPTIONAL
    group_id: int = 0


@dataclass(frozen=True)
class FeatureDiagram:
    """A feature tree plus cross-tree constraints.

    ``features`` holds every feature, the root included, sorted by name so
    that structurally equal diagrams compare equal.
    """

    root: str
    features: tuple[Feature, ...]
    constraints: tuple[Expr, ...] = ()
    _by_name: Mapping[str, Feature] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(sorted(self.features, key=lambda f: f.name)))
        object.__setattr__(self, "_by_name", {f.name: f for f in self.features})
        _check_tree(self)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.features)

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def feature(self, name: str) -> Feature:
        return self._by_name[name]

    def groups(self) -> dict[str, list[tuple[GroupKind, tuple[str, ...]]]]:
        """Child groups per parent, in a deterministic order.

        MANDATORY and OPTIONAL children each form a singleton group; OR/XOR
        children sharing a ``group_id`` under one parent form one group.
        """
        out: dict[str, list[tuple[GroupKind, tuple[str, ...]]]] = {}
        shared: dict[tuple[str, GroupKind, int], list[str]] = {}
        for f in self.features:
            if f.parent is None:
                continue
            if f.group in (GroupKind.OR, GroupKind.XOR):
                shared.setdefault((f.parent, f.group, f.group_id), []).append(f.name)
            else:
                out.setdefault(f.parent, []).append((f.group, (f.name,)))
        for (parent, kind, _), members in sorted(shared.items(), key=lambda kv: (kv[0][0], kv[0][1].value, kv[0][2])):
            out.setdefault(parent, []).append((kind, tuple(members)))
        return out

    def is_valid(self, product: Iterable[str]) -> bool:
        selected = frozenset(product)
        if not selected <= set(self.names):
            return False
        return evaluate(boolean_form(self), selected)


def _check_tree(d: FeatureDiagram) -> None:
    names = [f.name for f in d.features]
    for name in names:
        if not IDENTIFIER.match(name):
            raise ModelError("SYNTAX", f"invalid feature name {name!r}")
    by_name = {f.name: f for f in d.features}
    if d.root not in by_name:
        raise ModelError("UNKNOWN_FEATURE", f"root {d.root!r} is not a feature")
    if by_name[d.root].parent is not None:
        raise ModelError("NOT_A_TREE", f"root {d.root!r} has a parent")
    for f in d.features:
        if f.name != d.root:
            if f.parent is None:
                raise ModelError("NOT_A_TREE", f"{f.name!r} has no parent")
            if f.parent not in by_name:
                raise ModelError("UNKNOWN_FEATURE", f"parent {f.parent!r} of {f.name!r}")
    for f in d.features:
        seen = {f.name}
        cur = f
        while cur.parent is not None:
            if cur.parent in seen:
                raise ModelError("NOT_A_TREE", f"cycle through {cur.parent!r}")
            seen.add(cur.parent)
            cur = by_name[cur.parent]
    for c in d.constraints:
        unknown = variables(c) - by_name.keys()
        if unknown:
            raise ModelError("UNKNOWN_FEATURE", f"constraint {to_string(c)!r} names {sorted(unknown)}")


def parse_feature_diagram(document: str | Mapping[str, Any]) -> FeatureDiagram:
    """Build a diagram from its JSON document (text or already-decoded mapping)."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ModelError("SYNTAX", str(exc)) from exc
    if not isinstance(document, Mapping) or not isinstance(document.get("root"), str):
        raise ModelError("SYNTAX", "a feature diagram needs a string 'root'")
    root = document["root"]
    entries = document.get("features", [])
    constraints = document.get("constraints", [])
    if not isinstance(entries, list) or not isinstance(constraints, list):
        raise ModelError("SYNTAX", "'features' and 'constraints' must be arrays")

    parents: dict[str, str] = {}
    features = [Feature(root)]
    for entry in entries:
        if not isinstance(entry, Mapping) or not isinstance(entry.get("name"), str):
            raise ModelError("SYNTAX", f"bad feature entry {entry!r}")
        name, parent = entry["name"], entry.get("parent")
        if not isinstance(parent, str):
            raise ModelError("SYNTAX" if name != root else "NOT_A_TREE", f"feature {name!r} needs a parent")
        if name == root:
            raise ModelError("NOT_A_TREE", f"root {root!r} listed with parent {parent!r}")
        if name in parents:
            if parents[name] != parent:
                raise ModelError("NOT_A_TREE", f"{name!r} under both {parents[name]!r} and {parent!r}")
            raise ModelError("DUPLICATE_FEATURE", name)
        parents[name] = parent
        try:
            group = GroupKind(entry.get("group", "OPTIONAL"))
        except ValueError as exc:
            raise ModelError("SYNTAX", f"unknown group kind {entry.get('group')!r}") from exc
        group_id = entry.get("groupId", 0)
        if not isinstance(group_id, int):
            raise ModelError("SYNTAX", f"groupId of {name!r} must be an integer")
        features.append(Feature(name, parent, group, group_id))
    return FeatureDiagram(root, tuple(features), tuple(parse_expr(c) for c in constraints))


def diagram_to_json(d: FeatureDiagram) -> dict[str, Any]:
    entries = []
    for f in d.features:
        if f.parent is None:
            continue
        entry: dict[str, Any] = {"name": f.name, "parent": f.parent, "group": f.group.value}
        if f.group in (GroupKind.OR, GroupKind.XOR):
            entry["groupId"] = f.group_id
        entries.append(entry)
    return {"root": d.root, "features": entries, "constraints": [to_string(c) for c in d.constraints]}


@lru_cache(maxsize=None)
def boolean_form(d: FeatureDiagram) -> Expr:
    """Propositional formula whose models are exactly the valid products of ``d``."""
    parts: list[Expr] = [Var(d.root)]
    for f in d.features:
        if f.parent is not None:
            parts.append(implies(Var(f.name), Var(f.parent)))
    for parent, groups in d.groups().items():
        p = Var(parent)
        for kind, members in groups:
            kids = [Var(m) for m in members]
            if kind is GroupKind.MANDATORY:
                parts.append(implies(p, kids[0]))
            elif kind is GroupKind.OR:
                parts.append(implies(p, disj(*kids)))
            elif kind is GroupKind.XOR:
                parts.append(implies(p, disj(*kids)))
                for a, b in combinations(kids, 2):
                    parts.append(disj(neg(a), neg(b)))
    parts.extend(d.constraints)
    return conj(*parts)


def _check_vars(d: FeatureDiagram, e: Expr) -> None:
    unknown = variables(e) - set(d.names)
    if unknown:
        raise ModelError("UNKNOWN_FEATURE", f"{sorted(unknown)} not in diagram rooted at {d.root!r}")


def canonical(products: Iterable[Iterable[str]]) -> list[list[str]]:
    """Products as sorted name lists, themselves sorted."""
    return sorted(sorted(p) for p in products)


def sat_products(d: FeatureDiagram, e: Expr = TRUE) -> frozenset[Product]:
    """All valid products of ``d`` that satisfy ``e``, by blocking-clause AllSAT."""
    _check_vars(d, e)
    return frozenset(sat.all_models(conj(boolean_form(d), e), d.names))


def is_satisfiable(d: FeatureDiagram, e: Expr) -> bool:
    """Whether some valid product of ``d`` satisfies ``e``."""
    _check_vars(d, e)
    return sat.satisfiable(conj(boolean_form(d), e), d.names)


def enumerate_products(d: FeatureDiagram, cap: int = DEFAULT_ENUMERATION_CAP) -> frozenset[Product]:
    if len(d.features) > cap:
        raise ModelError("TOO_LARGE", f"{len(d.features)} features exceed the cap of {cap}; use sat_products")
    return sat_products(d, TRUE)
