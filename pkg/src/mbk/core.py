"""Cells, tables, marginals and moves for hierarchical log-linear models.

Everything here is an immutable value.  Tables are sparse: a cell that is
not stored has count zero.  Variables are numbered ``0..m-1`` and the
levels of variable ``d`` are ``0..levels[d]-1``.
"""

from __future__ import annotations

import itertools
import os
from collections import Counter
from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from .errors import (
    IdenticalTables,
    Inconsistent,
    MarginalMismatch,
    ModelError,
    NegativeCell,
    TooLarge,
)

Cell = tuple[int, ...]

DEFAULT_MAX_CELLS = 4096


def max_cells() -> int:
    """Global cap on ``|I|`` for exhaustive routines (env ``MBK_MAX_CELLS``)."""
    value = os.environ.get("MBK_MAX_CELLS")
    return int(value) if value else DEFAULT_MAX_CELLS


@dataclass(frozen=True)
class Verdict:
    """Boolean answer plus an optional witness explaining it.

    Truthiness follows ``ok`` so a verdict can be used directly in ``if``.
    """

    ok: bool
    witness: object = None

    def __bool__(self) -> bool:
        return self.ok


# ---------------------------------------------------------------------------
# model


@dataclass(frozen=True)
class ModelSpec:
    """A hierarchical model: level counts and a generating class.

    Facets are stored sorted, each as a sorted tuple.  A facet that is
    contained in another facet is rejected instead of silently dropped.
    """

    levels: tuple[int, ...]
    facets: tuple[tuple[int, ...], ...]

    def __init__(self, levels: Sequence[int], facets: Iterable[Iterable[int]]):
        levels = tuple(int(x) for x in levels)
        facet_list = [tuple(sorted(set(int(v) for v in f))) for f in facets]
        m = len(levels)
        if m < 1:
            raise ModelError("a model needs at least one variable")
        if any(x < 2 for x in levels):
            raise ModelError(f"every variable needs at least 2 levels, got {levels}")
        if not facet_list:
            raise ModelError("empty generating class")
        for f in facet_list:
            if not f:
                raise ModelError("empty facet")
            if f[0] < 0 or f[-1] >= m:
                raise ModelError(f"facet {f} refers to a variable outside 0..{m - 1}")
        if len(set(facet_list)) != len(facet_list):
            raise ModelError("duplicate facet")
        for a, b in itertools.permutations(facet_list, 2):
            if set(a) < set(b):
                raise ModelError(f"facet {a} is contained in facet {b}")
        covered = set().union(*facet_list)
        if covered != set(range(m)):
            missing = sorted(set(range(m)) - covered)
            raise ModelError(f"variables {missing} are not covered by any facet")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "facets", tuple(sorted(facet_list)))

    @property
    def m(self) -> int:
        return len(self.levels)

    @property
    def n_cells(self) -> int:
        return prod(self.levels)

    def cells(self) -> Iterator[Cell]:
        """All cells in lexicographic (row-major) order."""
        return itertools.product(*(range(x) for x in self.levels))

    def check_cell(self, cell: Sequence[int]) -> Cell:
        cell = tuple(cell)
        if len(cell) != self.m:
            raise ModelError(f"cell {cell} has length {len(cell)}, expected {self.m}")
        for lv, n in zip(cell, self.levels):
            if not 0 <= lv < n:
                raise ModelError(f"cell {cell} out of range for levels {self.levels}")
        return cell

    def check_table(self, table: "Table") -> "Table":
        for cell in table.support():
            self.check_cell(cell)
        return table

    def require_cells(self, cap: int | None = None) -> None:
        cap = max_cells() if cap is None else cap
        if self.n_cells > cap:
            raise TooLarge(f"|I| = {self.n_cells} exceeds the cell cap {cap}")

    @classmethod
    def complete_independence(cls, levels: Sequence[int]) -> "ModelSpec":
        return cls(levels, [[d] for d in range(len(levels))])

    @classmethod
    def saturated(cls, levels: Sequence[int]) -> "ModelSpec":
        return cls(levels, [list(range(len(levels)))])


# ---------------------------------------------------------------------------
# tables


class Table:
    """Sparse table of nonnegative integer counts, hashable and immutable."""

    __slots__ = ("_counts", "_items", "_hash")

    def __init__(self, counts: Mapping[Cell, int] | Iterable[tuple[Cell, int]] = ()):
        pairs = counts.items() if isinstance(counts, Mapping) else counts
        acc: dict[Cell, int] = {}
        for cell, n in pairs:
            n = int(n)
            cell = tuple(int(x) for x in cell)
            acc[cell] = acc.get(cell, 0) + n
        for cell, n in acc.items():
            if n < 0:
                raise NegativeCell(f"negative count {n} at cell {cell}")
        self._counts = {c: n for c, n in acc.items() if n}
        self._items = tuple(sorted(self._counts.items()))
        self._hash = hash(self._items)

    @classmethod
    def from_cells(cls, cells: Iterable[Sequence[int]]) -> "Table":
        """Table with one unit of mass per listed cell (repeats accumulate)."""
        return cls(Counter(tuple(c) for c in cells).items())

    def __getitem__(self, cell: Cell) -> int:
        return self._counts.get(cell, 0)

    def items(self) -> tuple[tuple[Cell, int], ...]:
        return self._items

    def support(self) -> tuple[Cell, ...]:
        return tuple(c for c, _ in self._items)

    def cells(self) -> tuple[Cell, ...]:
        """Cells as a sorted multiset (each cell repeated by its count)."""
        return tuple(c for c, n in self._items for _ in range(n))

    @property
    def total(self) -> int:
        return sum(self._counts.values())

    degree = total

    def __len__(self) -> int:
        return len(self._counts)

    def __bool__(self) -> bool:
        return bool(self._counts)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Table) and self._items == other._items

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "Table") -> bool:
        return self._items < other._items

    def divides(self, other: "Table") -> bool:
        """Componentwise ``self <= other`` (monomial divisibility)."""
        return all(other._counts.get(c, 0) >= n for c, n in self._items)

    def __add__(self, other: "Table") -> "Table":
        return Table(self._items + other._items)

    def __sub__(self, other: "Table") -> "Table":
        return Table(self._items + tuple((c, -n) for c, n in other._items))

    def __repr__(self) -> str:
        if not self._items:
            return "Table()"
        parts = []
        for cell, n in self._items:
            label = "(" + "".join(map(str, cell)) + ")" if all(x < 10 for x in cell) else str(cell)
            parts.append(label if n == 1 else f"{n}{label}")
        return "Table(" + "".join(parts) + ")"


class DegreeTwoTable(NamedTuple):
    """The table ``(i)(j)`` of sample size two; ``i == j`` means count 2 at ``i``."""

    i: Cell
    j: Cell

    @classmethod
    def of(cls, i: Sequence[int], j: Sequence[int]) -> "DegreeTwoTable":
        a, b = sorted((tuple(i), tuple(j)))
        return cls(a, b)

    @classmethod
    def from_table(cls, table: Table) -> "DegreeTwoTable":
        cells = table.cells()
        if len(cells) != 2:
            raise ModelError(f"table of sample size {len(cells)} is not degree two")
        return cls.of(*cells)

    def to_table(self) -> Table:
        return Table.from_cells((self.i, self.j))


# ---------------------------------------------------------------------------
# marginals


def marginalize(table: Table, variables: Iterable[int], m: int | None = None) -> dict[Cell, int]:
    """Sum ``table`` over the variables not in ``variables``.

    Marginal cells are indexed by the variables in ascending order; the
    empty subset gives ``{(): total}``.  Pass ``m`` to validate the subset
    even when the table is empty.
    """
    variables = tuple(sorted(set(variables)))
    if variables:
        hi = m if m is not None else min((len(c) for c in table.support()), default=None)
        if variables[0] < 0 or (hi is not None and variables[-1] >= hi):
            raise ModelError(f"variables {variables} out of range")
    else:
        return {(): table.total}
    out: dict[Cell, int] = {}
    for cell, n in table.items():
        key = tuple(cell[v] for v in variables)
        out[key] = out.get(key, 0) + n
    return out


def _project(margin: Mapping[Cell, int], facet: Sequence[int], sub: Sequence[int]) -> dict[Cell, int]:
    pos = [facet.index(v) for v in sub]
    out: dict[Cell, int] = {}
    for key, n in margin.items():
        k = tuple(key[p] for p in pos)
        out[k] = out.get(k, 0) + n
    return {k: n for k, n in out.items() if n}


@dataclass(frozen=True)
class MarginalVector:
    """The facet marginals ``b = An`` of a table, one sparse map per facet."""

    facets: tuple[tuple[int, ...], ...]
    margins: tuple[tuple[tuple[Cell, int], ...], ...]
    degree: int = field(compare=False)

    def __init__(self, facets: Iterable[Sequence[int]], margins: Iterable[Mapping[Cell, int]]):
        facets = tuple(tuple(f) for f in facets)
        normalized = []
        totals = set()
        for f, mp in zip(facets, margins, strict=True):
            items = []
            for key, n in mp.items():
                key = tuple(key)
                if len(key) != len(f):
                    raise ModelError(f"marginal cell {key} does not match facet {f}")
                if n < 0:
                    raise ModelError(f"negative marginal count at {key}")
                if n:
                    items.append((key, int(n)))
            normalized.append(tuple(sorted(items)))
            totals.add(sum(n for _, n in items))
        if len(totals) > 1:
            raise Inconsistent(f"facet marginals have different totals {sorted(totals)}")
        object.__setattr__(self, "facets", facets)
        object.__setattr__(self, "margins", tuple(normalized))
        object.__setattr__(self, "degree", totals.pop() if totals else 0)

    def margin(self, j: int) -> dict[Cell, int]:
        return dict(self.margins[j])

    def variable_margin(self, var: int) -> dict[int, int]:
        """One-dimensional marginal of ``var`` read off the first facet containing it."""
        for f, items in zip(self.facets, self.margins):
            if var in f:
                return {k[0]: n for k, n in _project(dict(items), f, (var,)).items()}
        raise ModelError(f"variable {var} is in no facet")

    def __repr__(self) -> str:
        body = ", ".join(f"{list(f)}: {dict(m)}" for f, m in zip(self.facets, self.margins))
        return f"MarginalVector(deg={self.degree}; {body})"


def compute_b(table: Table, model: ModelSpec) -> MarginalVector:
    model.check_table(table)
    return MarginalVector(model.facets, [marginalize(table, f, model.m) for f in model.facets])


def is_consistent(b: MarginalVector) -> bool:
    """Do all facet pairs agree on the marginal of their intersection?"""
    maps = [dict(m) for m in b.margins]
    totals = {sum(m.values()) for m in maps}
    if len(totals) > 1:
        return False
    for (f1, m1), (f2, m2) in itertools.combinations(zip(b.facets, maps), 2):
        common = tuple(sorted(set(f1) & set(f2)))
        if not common:
            continue
        if _project(m1, f1, common) != _project(m2, f2, common):
            return False
    return True


# ---------------------------------------------------------------------------
# moves


@dataclass(frozen=True, order=True)
class Move:
    """An integer table ``z = z+ - z-`` with equal facet marginals on both parts.

    Stored in canonical orientation: the lexicographically smallest cell of
    the support lies in ``pos``.  Hence ``z`` and ``-z`` have one stored
    form and sets of moves deduplicate up to sign.
    """

    pos: Table
    neg: Table

    def __post_init__(self):
        if not self.pos or not self.neg:
            raise ModelError("both parts of a move must be nonempty")
        if set(self.pos.support()) & set(self.neg.support()):
            raise ModelError("positive and negative parts overlap")
        if min(self.neg.support()) < min(self.pos.support()):
            p, n = self.neg, self.pos
            object.__setattr__(self, "pos", p)
            object.__setattr__(self, "neg", n)

    @classmethod
    def between(cls, t1: Table, t2: Table) -> "Move":
        """``t1 - t2`` with common mass cancelled (no marginal check)."""
        diff = Counter(dict(t1.items()))
        diff.subtract(dict(t2.items()))
        pos = Table((c, n) for c, n in diff.items() if n > 0)
        neg = Table((c, -n) for c, n in diff.items() if n < 0)
        if not pos:
            raise IdenticalTables("tables are identical")
        return cls(pos, neg)

    @property
    def degree(self) -> int:
        return self.pos.total

    def support(self) -> tuple[Cell, ...]:
        return tuple(sorted(self.pos.support() + self.neg.support()))

    def entries(self) -> dict[Cell, int]:
        out = dict(self.pos.items())
        out.update((c, -n) for c, n in self.neg.items())
        return out

    def is_balanced(self, model: ModelSpec) -> bool:
        return compute_b(self.pos, model) == compute_b(self.neg, model)

    def relabel(self, perms: Sequence[Sequence[int]]) -> "Move":
        """Apply per-variable level permutations ``perms[d][old] = new``."""

        def mv(t: Table) -> Table:
            return Table((tuple(p[x] for p, x in zip(perms, c)), n) for c, n in t.items())

        return Move(mv(self.pos), mv(self.neg))

    def __repr__(self) -> str:
        return f"Move({self.pos!r} - {self.neg!r})"


def move_from_tables(t1: Table, t2: Table, model: ModelSpec | None = None) -> Move:
    """The move joining two tables of one fiber (canonically oriented)."""
    if t1 == t2:
        raise IdenticalTables("tables are identical")
    if model is not None and compute_b(t1, model) != compute_b(t2, model):
        raise MarginalMismatch("tables lie in different fibers")
    if model is None and t1.total != t2.total:
        raise MarginalMismatch("tables have different sample sizes")
    return Move.between(t1, t2)


def apply_move(table: Table, move: Move, sign: int = 1) -> Table:
    """Return ``table + sign * move``; raises NegativeCell if not applicable."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    add, sub = (move.pos, move.neg) if sign == 1 else (move.neg, move.pos)
    if not sub.divides(table):
        raise NegativeCell("move not applicable to this table")
    return table - sub + add
