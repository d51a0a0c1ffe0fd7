"""Structure of fibers of sample size two.

For a degree-two marginal vector every variable is either degenerate (one
level carries both units) or non-degenerate (two levels carry one unit
each).  The non-degenerate variables split into connected components of
the induced independence graph; inside a component the two cells are tied
together, across components they may be swapped independently.  A fiber
with ``c`` components therefore has ``2**(c-1)`` members.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Iterator, Sequence

from .chordal import Graph, boundary_cliques, independence_graph, is_chordal, maximal_cliques
from .core import Cell, MarginalVector, ModelSpec, Table, Verdict, compute_b, is_consistent, max_cells
from .errors import Inconsistent, NotDegreeTwo, TooLarge


@dataclass(frozen=True)
class FiberKey:
    """A degree-two marginal vector together with its decoded structure.

    ``pairs`` maps each non-degenerate variable to its two realized levels
    ``(a, b)`` with ``a < b``.  ``patterns[k]`` lists the levels taken by the
    variables of ``components[k]`` in one of the two cells; in that cell the
    smallest variable of the component sits at its lower level ``a``.
    """

    b: MarginalVector
    nondegenerate: tuple[int, ...]
    degenerate: tuple[tuple[int, int], ...]
    pairs: tuple[tuple[int, tuple[int, int]], ...]
    components: tuple[tuple[int, ...], ...]
    patterns: tuple[tuple[int, ...], ...]

    @property
    def c(self) -> int:
        return len(self.components)

    @property
    def size(self) -> int:
        return 2 ** (self.c - 1) if self.c else 1

    @property
    def m(self) -> int:
        return len(self.degenerate) + len(self.nondegenerate)

    def sort_key(self):
        return (self.nondegenerate, self.degenerate, self.pairs, self.patterns)

    def is_representative(self) -> bool:
        return all(lv == 0 for _, lv in self.degenerate) and all(
            p == (0, 1) for _, p in self.pairs
        ) and all(set(p) <= {0} for p in self.patterns)

    def _swap(self) -> dict[int, dict[int, int]]:
        return {v: {a: b, b: a} for v, (a, b) in self.pairs}

    def member(self, bits: Sequence[int] = ()) -> Table:
        """Member with components ``1..c-1`` flipped where ``bits`` is 1."""
        bits = tuple(bits) or (0,) * max(self.c - 1, 0)
        if len(bits) != max(self.c - 1, 0):
            raise ValueError(f"need {self.c - 1} bits, got {len(bits)}")
        swap = self._swap()
        cell = [0] * self.m
        for v, lv in self.degenerate:
            cell[v] = lv
        for k, (comp, pat) in enumerate(zip(self.components, self.patterns)):
            flip = k > 0 and bits[k - 1]
            for v, lv in zip(comp, pat):
                cell[v] = swap[v][lv] if flip else lv
        other = list(cell)
        for v in self.nondegenerate:
            other[v] = swap[v][cell[v]]
        return Table.from_cells([tuple(cell), tuple(other)])

    def members(self) -> list[Table]:
        """All members; bit vectors run in product order (component 2 most significant)."""
        return [self.member(bits) for bits in itertools.product((0, 1), repeat=max(self.c - 1, 0))]

    def flip(self, table: Table, comps: Sequence[int]) -> Table:
        """Swap the realized level pair of every variable in the given components."""
        swap = self._swap()
        vs = {v for k in comps for v in self.components[k]}

        def mv(cell: Cell) -> Cell:
            return tuple(swap[v][x] if v in vs else x for v, x in enumerate(cell))

        return Table((mv(c), n) for c, n in table.items())

    def act(self, table: Table, vector: Sequence[int]) -> Table:
        """Group element of the stabilizer given as a GF(2) vector over components 2..c."""
        return self.flip(table, [k + 1 for k, bit in enumerate(vector) if bit])

    def describe(self) -> str:
        """Short human-readable summary with 1-based variable labels."""
        nd = "{" + ",".join(str(v + 1) for v in self.nondegenerate) + "}"
        comps = " ".join("{" + ",".join(str(v + 1) for v in comp) + "}" for comp in self.components)
        return f"nondegenerate={nd} c={self.c} size={self.size} components={comps}"


@dataclass(frozen=True)
class Fiber:
    key: FiberKey
    members: tuple[Table, ...]

    def __len__(self) -> int:
        return len(self.members)


# ---------------------------------------------------------------------------
# decoding a marginal vector


def classify_variables(b: MarginalVector):
    """Split variables into non-degenerate and degenerate ones.

    Returns ``(nondegenerate, degenerate, pairs)`` where ``degenerate`` maps
    a variable to its doubled level and ``pairs`` maps a non-degenerate
    variable to its two levels.
    """
    if b.degree != 2:
        raise NotDegreeTwo(f"marginal vector has degree {b.degree}")
    if not is_consistent(b):
        raise Inconsistent("facet marginals disagree on an intersection")
    m = max(v for f in b.facets for v in f) + 1
    nondeg, degen, pairs = [], {}, {}
    for v in range(m):
        margin = b.variable_margin(v)
        if len(margin) == 1:
            (lv,) = margin
            degen[v] = lv
        else:
            nondeg.append(v)
            pairs[v] = tuple(sorted(margin))
    return tuple(nondeg), degen, pairs


def component_patterns(b: MarginalVector, model: ModelSpec) -> list[tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]]:
    """Components of the induced non-degenerate graph and their two cell patterns.

    Each entry is ``(component, side_a, side_b)``.  The pairing is found by
    walking facet marginals outward from the smallest variable of each
    component; any contradiction raises ``Inconsistent``.
    """
    return [(comp, a, tuple(_pairs_swap(pairs, comp, a))) for comp, a, pairs in _patterns(b, model)]


def _pairs_swap(pairs, comp, side):
    return [pairs[v][1] if lv == pairs[v][0] else pairs[v][0] for v, lv in zip(comp, side)]


def _patterns(b: MarginalVector, model: ModelSpec):
    nondeg, degen, pairs = classify_variables(b)
    g = independence_graph(model)
    margins = [dict(mp) for mp in b.margins]
    in_facets = {v: [j for j, f in enumerate(b.facets) if v in f] for v in range(model.m)}
    out = []
    for comp in g.components(nondeg):
        root = comp[0]
        side = {root: pairs[root][0]}
        stack = [root]
        while stack:
            v = stack.pop()
            for j in in_facets[v]:
                f = b.facets[j]
                idx = f.index(v)
                hits = [key for key, n in margins[j].items() if key[idx] == side[v]]
                if len(hits) != 1 or margins[j][hits[0]] != 1:
                    raise Inconsistent(f"facet {f} marginal cannot pair variable {v}")
                cell = hits[0]
                for u, lv in zip(f, cell):
                    if u in degen:
                        if degen[u] != lv:
                            raise Inconsistent(f"facet {f} disagrees with degenerate variable {u}")
                    elif u not in side:
                        side[u] = lv
                        stack.append(u)
                    elif side[u] != lv:
                        raise Inconsistent(f"pairing contradiction at variable {u}")
        out.append((comp, tuple(side[v] for v in comp), pairs))
    return out


def fiber_key(b: MarginalVector, model: ModelSpec) -> FiberKey:
    """Decode a degree-two marginal vector; ``Inconsistent`` if no table realizes it."""
    nondeg, degen, pairs = classify_variables(b)
    pats = _patterns(b, model)
    key = FiberKey(
        b=b,
        nondegenerate=nondeg,
        degenerate=tuple(sorted(degen.items())),
        pairs=tuple(sorted(pairs.items())),
        components=tuple(comp for comp, _, _ in pats),
        patterns=tuple(side for _, side, _ in pats),
    )
    # propagation only looks at single facets, so confirm the whole vector
    if compute_b(key.member(), model) != b:
        raise Inconsistent("marginal vector is consistent but not realizable")
    return key


def fiber_size(b: MarginalVector, model: ModelSpec) -> int:
    """``2**(c-1)``; a vector with no non-degenerate variable has a one-table fiber."""
    return fiber_key(b, model).size


def enumerate_fiber(b: MarginalVector, model: ModelSpec) -> Fiber:
    key = fiber_key(b, model)
    return Fiber(key, tuple(key.members()))


# ---------------------------------------------------------------------------
# enumeration of fibers


def _key_from_parts(model, nondeg, comps, degen, pairs, patterns) -> FiberKey:
    key = FiberKey(
        b=None,
        nondegenerate=tuple(nondeg),
        degenerate=tuple(sorted(degen.items())),
        pairs=tuple(sorted(pairs.items())),
        components=tuple(comps),
        patterns=tuple(patterns),
    )
    return replace(key, b=compute_b(key.member(), model))


def _subsets(m: int) -> Iterator[tuple[int, ...]]:
    for size in range(1, m + 1):
        yield from itertools.combinations(range(m), size)


def enumerate_representative_fibers(model: ModelSpec) -> list[FiberKey]:
    """One standardized key per non-degenerate set with at least two components.

    Degenerate variables sit at level 0, every non-degenerate variable uses
    levels ``(0, 1)`` and every component is all-0 in the first cell, so the
    base member is ``(0...0)(1...1 0...0)``.
    """
    g = independence_graph(model)
    out = []
    for nd in _subsets(model.m):
        comps = g.components(nd)
        if len(comps) < 2:
            continue
        degen = {v: 0 for v in range(model.m) if v not in nd}
        pairs = {v: (0, 1) for v in nd}
        out.append(_key_from_parts(model, nd, comps, degen, pairs, [(0,) * len(c) for c in comps]))
    return out


def iter_nd_fibers(model: ModelSpec) -> Iterator[FiberKey]:
    """Every degree-two fiber with at least two members, built structurally.

    A key is fixed by the non-degenerate set, the degenerate levels, the
    level pair of each non-degenerate variable and, per component, which
    levels go together.  Order is deterministic.
    """
    g = independence_graph(model)
    for nd in _subsets(model.m):
        comps = g.components(nd)
        if len(comps) < 2:
            continue
        degen_vars = [v for v in range(model.m) if v not in nd]
        degen_choices = itertools.product(*(range(model.levels[v]) for v in degen_vars))
        for dl in degen_choices:
            degen = dict(zip(degen_vars, dl))
            for pl in itertools.product(*(itertools.combinations(range(model.levels[v]), 2) for v in nd)):
                pairs = dict(zip(nd, pl))
                per_comp = []
                for comp in comps:
                    opts = [((pairs[comp[0]][0],),)]
                    for v in comp[1:]:
                        opts.append(((pairs[v][0],), (pairs[v][1],)))
                    per_comp.append([sum(choice, ()) for choice in itertools.product(*opts)])
                for pats in itertools.product(*per_comp):
                    yield _key_from_parts(model, nd, comps, degen, pairs, pats)


def count_nd_fibers(model: ModelSpec) -> int:
    """Closed-form ``|B_nd|`` from the structural parametrization."""
    g = independence_graph(model)
    total = 0
    for nd in _subsets(model.m):
        comps = g.components(nd)
        if len(comps) < 2:
            continue
        term = 1
        for v in range(model.m):
            x = model.levels[v]
            term *= x * (x - 1) // 2 if v in nd else x
        for comp in comps:
            term *= 2 ** (len(comp) - 1)
        total += term
    return total


def enumerate_all_degree2_fibers(model: ModelSpec, cap: int | None = None) -> list[FiberKey]:
    """All degree-two fibers with two or more members, by grouping cell pairs.

    Every unordered pair of distinct cells is keyed by its facet marginals;
    groups with at least two pairs are the fibers.  Quadratic in ``|I|``.
    """
    cap = max_cells() if cap is None else cap
    if model.n_cells > cap:
        raise TooLarge(f"|I| = {model.n_cells} exceeds the cap {cap} for the cell-pair scan")
    cells = list(model.cells())
    proj = [tuple(tuple(c[v] for v in f) for f in model.facets) for c in cells]
    groups: dict[tuple, list[tuple[int, int]]] = {}
    for x, y in itertools.combinations(range(len(cells)), 2):
        px, py = proj[x], proj[y]
        key = tuple((a, b) if a <= b else (b, a) for a, b in zip(px, py))
        groups.setdefault(key, []).append((x, y))
    out = []
    for members in groups.values():
        if len(members) >= 2:
            x, y = members[0]
            b = compute_b(Table.from_cells([cells[x], cells[y]]), model)
            out.append(fiber_key(b, model))
    return sorted(out, key=FiberKey.sort_key)


# ---------------------------------------------------------------------------
# uniqueness of minimal bases


def independent_triple(g: Graph) -> tuple[int, int, int] | None:
    """Three pairwise non-adjacent vertices, smallest first, or None."""
    for t in itertools.combinations(g.vertices, 3):
        if not any(g.has_edge(u, v) for u, v in itertools.combinations(t, 2)):
            return t
    return None


def boundary_clique_unique(g: Graph) -> bool:
    """At most two boundary cliques, and together they cover every clique.

    Only meaningful for chordal graphs.
    """
    bcs = boundary_cliques(g)
    if len(bcs) > 2:
        return False
    cover = set().union(*(bc.clique for bc in bcs))
    return all(set(c) <= cover for c in maximal_cliques(g))


def minimal_bases_nonunique(model: ModelSpec) -> Verdict:
    """Is there a degree-two fiber with more than two members?

    Chordal independence graphs use the boundary-clique test; other graphs
    fall back to looking for three mutually non-adjacent variables.  The
    witness is such a triple.
    """
    g = independence_graph(model)
    if is_chordal(g):
        nonunique = not boundary_clique_unique(g)
    else:
        nonunique = independent_triple(g) is not None
    return Verdict(nonunique, independent_triple(g) if nonunique else None)
