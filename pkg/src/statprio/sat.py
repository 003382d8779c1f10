"""CNF encoding of feature expressions and all-solutions enumeration.

Expressions are Tseitin-encoded; auxiliary variables never appear in
blocking clauses, so each model is reported once per assignment of the
named variables.
"""

from __future__ import annotations

from typing import Iterator, Sequence

from pysat.solvers import Solver

from .expr import And, Const, Expr, Not, Or, Var

SOLVER_NAME = "m22"


class CnfBuilder:
    """Accumulates clauses; variables 1..n are the named ones, in the given order."""

    def __init__(self, names: Sequence[str]):
        self.index = {name: i + 1 for i, name in enumerate(names)}
        self.names = tuple(names)
        self.top = len(names)
        self.clauses: list[list[int]] = []
        self._cache: dict[Expr, int] = {}

    def fresh(self) -> int:
        self.top += 1
        return self.top

    def literal(self, e: Expr) -> int:
        if isinstance(e, Var):
            return self.index[e.name]
        if isinstance(e, Not):
            return -self.literal(e.arg)
        if e in self._cache:
            return self._cache[e]
        out = self.fresh()
        if isinstance(e, Const):
            self.clauses.append([out] if e.value else [-out])
        elif isinstance(e, And):
            lits = [self.literal(a) for a in e.args]
            for lit in lits:
                self.clauses.append([-out, lit])
            self.clauses.append([out] + [-lit for lit in lits])
        elif isinstance(e, Or):
            lits = [self.literal(a) for a in e.args]
            self.clauses.append([-out] + lits)
            for lit in lits:
                self.clauses.append([out, -lit])
        else:
            raise TypeError(f"not a feature expression: {e!r}")
        self._cache[e] = out
        return out

    def assert_expr(self, e: Expr) -> None:
        # top-level conjunctions become separate unit-rooted clauses
        if isinstance(e, And):
            for a in e.args:
                self.assert_expr(a)
        elif isinstance(e, Or) and all(isinstance(a, (Var, Not)) for a in e.args):
            self.clauses.append([self.literal(a) for a in e.args])
        else:
            self.clauses.append([self.literal(e)])


def _models(builder: CnfBuilder, limit: int | None = None) -> Iterator[frozenset[str]]:
    n = len(builder.names)
    with Solver(name=SOLVER_NAME, bootstrap_with=builder.clauses) as solver:
        found = 0
        while solver.solve():
            model = solver.get_model()
            assignment = [model[i] > 0 if i < len(model) else False for i in range(n)]
            yield frozenset(name for name, on in zip(builder.names, assignment) if on)
            found += 1
            if limit is not None and found >= limit:
                return
            blocking = [-(i + 1) if on else (i + 1) for i, on in enumerate(assignment)]
            if not blocking:
                return
            solver.add_clause(blocking)


def all_models(formula: Expr, names: Sequence[str]) -> list[frozenset[str]]:
    """Every assignment of ``names`` (as the set of true names) satisfying ``formula``."""
    builder = CnfBuilder(names)
    builder.assert_expr(formula)
    return list(_models(builder))


def satisfiable(formula: Expr, names: Sequence[str]) -> bool:
    builder = CnfBuilder(names)
    builder.assert_expr(formula)
    return any(True for _ in _models(builder, limit=1))
