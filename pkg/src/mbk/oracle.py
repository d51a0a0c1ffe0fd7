"""Brute-force ground truth used to check every structural result.

Nothing here relies on the degree-two theory: fibers are found by
placing unit masses cell by cell under the marginal constraints, and
connectivity is plain union-find over the fiber.
"""

from __future__ import annotations

import itertools
from math import comb
from typing import Iterable, Iterator, Sequence

from .chordal import Graph
from .core import Cell, MarginalVector, ModelSpec, Move, Table, Verdict, apply_move, max_cells
from .errors import NegativeCell, TooLarge

DEFAULT_MAX_DEGREE = 4
DEFAULT_MAX_TABLES = 2_000_000
MAX_SCAN_VERTICES = 16


def _one_dim_support(b: MarginalVector, model: ModelSpec) -> list[list[int]]:
    levels = []
    for v in range(model.m):
        j = next(j for j, f in enumerate(b.facets) if v in f)
        idx = b.facets[j].index(v)
        levels.append(sorted({key[idx] for key, n in b.margins[j] if n > 0}))
    return levels


def enumerate_fiber_bruteforce(
    b: MarginalVector,
    model: ModelSpec,
    max_degree: int = DEFAULT_MAX_DEGREE,
    cap: int | None = None,
) -> list[Table]:
    """All nonnegative tables with facet marginals ``b``, sorted.

    Candidate cells are restricted to levels with positive one-way
    marginal; mass is then placed one unit at a time in nondecreasing cell
    order, pruning whenever a facet marginal would be exceeded.
    """
    cap = max_cells() if cap is None else cap
    if model.n_cells > cap:
        raise TooLarge(f"|I| = {model.n_cells} exceeds the cap {cap}")
    if b.degree > max_degree:
        raise TooLarge(f"degree {b.degree} exceeds the cap {max_degree}")
    if tuple(b.facets) != model.facets:
        raise ValueError("marginal vector does not belong to this model")
    if b.degree == 0:
        return [Table()]
    remaining = [dict(mp) for mp in b.margins]
    cand = list(itertools.product(*_one_dim_support(b, model)))
    proj = [[tuple(c[v] for v in f) for f in model.facets] for c in cand]
    nf = len(model.facets)
    out: list[Table] = []
    chosen: list[Cell] = []

    def place(start: int, left: int) -> None:
        if left == 0:
            out.append(Table.from_cells(chosen))
            return
        for idx in range(start, len(cand)):
            keys = proj[idx]
            if all(remaining[j].get(keys[j], 0) > 0 for j in range(nf)):
                for j in range(nf):
                    remaining[j][keys[j]] -= 1
                chosen.append(cand[idx])
                place(idx, left - 1)
                chosen.pop()
                for j in range(nf):
                    remaining[j][keys[j]] += 1

    place(0, b.degree)
    return sorted(out)


def iter_fibers(model: ModelSpec, degree: int, max_tables: int = DEFAULT_MAX_TABLES) -> list[list[Table]]:
    """Every fiber of the given degree, as lists of member tables.

    All multisets of ``degree`` cells are grouped by their facet marginals.
    """
    model.require_cells()
    n = model.n_cells
    if comb(n + degree - 1, degree) > max_tables:
        raise TooLarge(f"{comb(n + degree - 1, degree)} tables of degree {degree} exceed the cap {max_tables}")
    cells = list(model.cells())
    proj = [tuple(tuple(c[v] for v in f) for f in model.facets) for c in cells]
    groups: dict[tuple, list[tuple[int, ...]]] = {}
    for combo in itertools.combinations_with_replacement(range(n), degree):
        key = tuple(tuple(sorted(proj[i][j] for i in combo)) for j in range(len(model.facets)))
        groups.setdefault(key, []).append(combo)
    out = []
    for combos in groups.values():
        out.append([Table.from_cells(cells[i] for i in combo) for combo in combos])
    out.sort(key=lambda members: members[0])
    return out


def fiber_graph_connected(members: Sequence[Table], moves: Iterable[Move]) -> Verdict:
    """Union-find over a fiber; edge when two members differ by ``+-z``.

    The witness is the list of connected components (each a sorted list).
    """
    members = list(members)
    index = {t: i for i, t in enumerate(members)}
    parent = list(range(len(members)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    # index each (move, sign) by one cell its subtracted part needs
    by_cell: dict[Cell, list[tuple[Move, int]]] = {}
    for z in moves:
        by_cell.setdefault(z.neg.support()[0], []).append((z, 1))
        by_cell.setdefault(z.pos.support()[0], []).append((z, -1))
    for t, i in index.items():
        for cell in t.support():
            for z, sign in by_cell.get(cell, ()):
                try:
                    other = apply_move(t, z, sign)
                except NegativeCell:
                    continue
                j = index.get(other)
                if j is not None:
                    ri, rj = find(i), find(j)
                    if ri != rj:
                        parent[max(ri, rj)] = min(ri, rj)
    comps: dict[int, list[Table]] = {}
    for t, i in index.items():
        comps.setdefault(find(i), []).append(t)
    parts = sorted(sorted(c) for c in comps.values())
    return Verdict(len(parts) <= 1, parts)


def induced_component_scan(g: Graph, max_parts: int | None = None) -> int:
    """Largest number of connected components over all induced subgraphs.

    Stops early once ``max_parts`` is reached.
    """
    vs = list(g.vertices)
    if len(vs) > MAX_SCAN_VERTICES:
        raise TooLarge(f"subset scan over {len(vs)} vertices exceeds {MAX_SCAN_VERTICES}")
    best = 0
    for size in range(1, len(vs) + 1):
        for sub in itertools.combinations(vs, size):
            best = max(best, len(g.components(sub)))
            if max_parts is not None and best >= max_parts:
                return best
    return best


def has_chordless_cycle(g: Graph) -> bool:
    """Exhaustive search for an induced cycle of length four or more."""
    vs = list(g.vertices)
    for size in range(4, len(vs) + 1):
        for sub in itertools.combinations(vs, size):
            s = set(sub)
            if all(len(g.neighbors(v) & s) == 2 for v in sub) and len(g.components(sub)) == 1:
                return True
    return False


def degree_two_fiber_sizes(model: ModelSpec) -> dict[tuple, int]:
    """Size of every nonempty degree-two fiber, by grouping all cell pairs.

    Keys are tuples holding, per facet, the sorted pair of projected cells;
    ``iter_consistent_degree_two_keys`` yields keys in the same format.
    """
    model.require_cells()
    cells = list(model.cells())
    proj = [tuple(tuple(c[v] for v in f) for f in model.facets) for c in cells]
    sizes: dict[tuple, int] = {}
    for x, y in itertools.combinations_with_replacement(range(len(cells)), 2):
        key = tuple((a, b) if a <= b else (b, a) for a, b in zip(proj[x], proj[y]))
        sizes[key] = sizes.get(key, 0) + 1
    return sizes


def iter_consistent_degree_two_keys(model: ModelSpec) -> Iterator[tuple[tuple[int, ...], tuple]]:
    """Every consistent degree-two marginal vector, realizable or not.

    Yields ``(nondegenerate, key)``.  Each variable gets a one-way marginal
    (one doubled level or two single levels); each facet then gets a
    compatible pair of facet cells, and facets are accepted only if they
    agree on every pairwise intersection.
    """
    facets = model.facets
    nf = len(facets)
    profiles = []
    for v in range(model.m):
        opts = [(lv,) for lv in range(model.levels[v])]
        opts += list(itertools.combinations(range(model.levels[v]), 2))
        profiles.append(opts)
    # overlaps between facets: (i, k, positions in facet i, positions in facet k), i < k
    edges = []
    for k in range(nf):
        for i in range(k):
            common = sorted(set(facets[i]) & set(facets[k]))
            if common:
                edges.append((i, k, [facets[i].index(v) for v in common], [facets[k].index(v) for v in common]))
    incoming = [[e for e, (_, k, _, _) in enumerate(edges) if k == f] for f in range(nf)]
    outgoing = [[e for e, (i, _, _, _) in enumerate(edges) if i == f] for f in range(nf)]

    def restrict(pair, pos):
        a = tuple(pair[0][p] for p in pos)
        b = tuple(pair[1][p] for p in pos)
        return (a, b) if a <= b else (b, a)

    # facet options depend only on the profile restricted to the facet
    caches: list[dict] = [{} for _ in range(nf)]

    def facet_options(k, sub):
        got = caches[k].get(sub)
        if got is not None:
            return got
        nd = [p for p, pr in enumerate(sub) if len(pr) == 2]
        opts = []
        for flips in itertools.product((0, 1), repeat=max(len(nd) - 1, 0)):
            choice = dict(zip(nd, (0,) + flips))
            c1 = tuple(pr[choice[p]] if p in choice else pr[0] for p, pr in enumerate(sub))
            c2 = tuple(pr[1 - choice[p]] if p in choice else pr[0] for p, pr in enumerate(sub))
            pair = (c1, c2) if c1 <= c2 else (c2, c1)
            sig_in = tuple(restrict(pair, edges[e][3]) for e in incoming[k])
            sig_out = [(e, restrict(pair, edges[e][2])) for e in outgoing[k]]
            opts.append((pair, sig_in, sig_out))
        caches[k][sub] = opts
        return opts

    for prof in itertools.product(*profiles):
        options = [facet_options(k, tuple(prof[v] for v in f)) for k, f in enumerate(facets)]
        nondeg = tuple(v for v in range(model.m) if len(prof[v]) == 2)
        chosen: list = [None] * nf
        seen = [None] * len(edges)

        def rec(k):
            if k == nf:
                yield tuple(chosen)
                return
            need = tuple(seen[e] for e in incoming[k])
            for pair, sig_in, sig_out in options[k]:
                if sig_in == need:
                    chosen[k] = pair
                    for e, sig in sig_out:
                        seen[e] = sig
                    yield from rec(k + 1)

        for key in rec(0):
            yield nondeg, key


def iter_consistent_degree_two_margins(model: ModelSpec) -> Iterator[MarginalVector]:
    """``iter_consistent_degree_two_keys`` as ``MarginalVector`` objects."""
    for _, key in iter_consistent_degree_two_keys(model):
        margins = []
        for c1, c2 in key:
            mp = {c1: 1}
            mp[c2] = mp.get(c2, 0) + 1
            margins.append(mp)
        yield MarginalVector(model.facets, margins)
