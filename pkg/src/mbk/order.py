"""Term orders on tables of equal sample size.

The default order peels boundary cliques to order the variables, sorts
cells lexicographically with that variable order (first variable most
significant, level 0 lowest) and compares tables by reverse lexicographic
order: scanning from the last cell backwards, the first cell where the
counts differ decides, and the table with the *smaller* count there is the
larger one.
"""

from __future__ import annotations

from functools import cmp_to_key
from typing import Iterable, Mapping, Sequence

from .chordal import elimination_variable_order, independence_graph
from .core import Cell, ModelSpec, Move, Table
from .errors import DegreeMismatch


class TermOrder:
    """Total order on tables of equal degree.

    ``kind`` is ``"revlex"`` (default) or ``"lex"``.  ``cell_rank`` replaces the
    lexicographic cell order with an explicit ranking (used by the
    twisted 3x3 counterexample); otherwise cells are ranked by their levels read
    in ``variable_order``.
    """

    def __init__(
        self,
        model: ModelSpec,
        variable_order: Sequence[int] | None = None,
        kind: str = "revlex",
        cell_rank: Mapping[Cell, int] | None = None,
    ):
        if kind not in ("revlex", "lex"):
            raise ValueError(f"unknown term order kind {kind!r}")
        self.model = model
        self.kind = kind
        self.cell_rank = dict(cell_rank) if cell_rank is not None else None
        if variable_order is None:
            variable_order = elimination_variable_order(independence_graph(model))
        if sorted(variable_order) != list(range(model.m)):
            raise ValueError(f"{variable_order} is not a permutation of the variables")
        self.variable_order = tuple(variable_order)

    @classmethod
    def default(cls, model: ModelSpec) -> "TermOrder":
        return cls(model)

    def cell_key(self, cell: Cell):
        if self.cell_rank is not None:
            return self.cell_rank[cell]
        return tuple(cell[v] for v in self.variable_order)

    def cell_order(self) -> list[Cell]:
        return sorted(self.model.cells(), key=self.cell_key)

    def compare(self, t1: Table, t2: Table) -> int:
        """1 if ``t1`` is larger, -1 if smaller, 0 if equal."""
        if t1.total != t2.total:
            raise DegreeMismatch(f"cannot compare tables of degree {t1.total} and {t2.total}")
        diff = [c for c in set(t1.support()) | set(t2.support()) if t1[c] != t2[c]]
        if not diff:
            return 0
        if self.kind == "revlex":
            cell = max(diff, key=self.cell_key)
            return 1 if t1[cell] < t2[cell] else -1
        cell = min(diff, key=self.cell_key)
        return 1 if t1[cell] > t2[cell] else -1

    @property
    def sort_key(self):
        return cmp_to_key(self.compare)

    def minimum(self, tables: Iterable[Table]) -> Table:
        return min(tables, key=self.sort_key)

    def orient(self, move: Move) -> tuple[Table, Table]:
        """``(leading, trailing)`` parts of a move."""
        if self.compare(move.pos, move.neg) > 0:
            return move.pos, move.neg
        return move.neg, move.pos


def compare(t1: Table, t2: Table, order: TermOrder) -> int:
    return order.compare(t1, t2)


def fiber_minimum(members: Iterable[Table], order: TermOrder) -> Table:
    """The lowest member of a fiber under ``order``."""
    members = list(members)
    if not members:
        raise ValueError("empty fiber")
    return order.minimum(members)
