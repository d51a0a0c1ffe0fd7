"""Independence graphs and chordal-graph machinery.

Maximum cardinality search gives the chordality test and a perfect
elimination ordering; cliques, clique trees, boundary cliques and the
boundary-clique elimination order are derived from it.  All tie-breaks are
by smallest label so results are reproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .core import ModelSpec, Verdict
from .errors import NotChordal


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on integer labels (not necessarily ``0..n-1``)."""

    vertices: tuple[int, ...]
    edges: frozenset[tuple[int, int]]

    def __init__(self, vertices: Iterable[int], edges: Iterable[Sequence[int]] = ()):
        vs = tuple(sorted(set(vertices)))
        es = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if u not in vs or v not in vs:
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside the vertex set")
            es.add((min(u, v), max(u, v)))
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "edges", frozenset(es))
        adj: dict[int, set[int]] = {v: set() for v in vs}
        for u, v in es:
            adj[u].add(v)
            adj[v].add(u)
        object.__setattr__(self, "_adj", {v: frozenset(n) for v, n in adj.items()})

    @classmethod
    def on(cls, n: int, edges: Iterable[Sequence[int]] = ()) -> "Graph":
        return cls(range(n), edges)

    def neighbors(self, v: int) -> frozenset[int]:
        return self._adj[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def induced(self, keep: Iterable[int]) -> "Graph":
        keep = set(keep)
        return Graph(keep, [e for e in self.edges if e[0] in keep and e[1] in keep])

    def is_complete(self, vs: Iterable[int]) -> bool:
        vs = list(vs)
        return all(self.has_edge(u, v) for u, v in itertools.combinations(vs, 2))

    def components(self, within: Iterable[int] | None = None) -> list[tuple[int, ...]]:
        """Connected components of the subgraph induced on ``within`` (sorted)."""
        todo = set(self.vertices if within is None else within)
        out = []
        while todo:
            start = min(todo)
            comp, stack = {start}, [start]
            while stack:
                u = stack.pop()
                for w in self._adj[u]:
                    if w in todo and w not in comp:
                        comp.add(w)
                        stack.append(w)
            todo -= comp
            out.append(tuple(sorted(comp)))
        return sorted(out)

    def __len__(self) -> int:
        return len(self.vertices)


def independence_graph(model: ModelSpec) -> Graph:
    """Edge between two variables iff some facet contains both."""
    edges = {pair for f in model.facets for pair in itertools.combinations(f, 2)}
    return Graph.on(model.m, edges)


# ---------------------------------------------------------------------------
# chordality


def maximum_cardinality_search(g: Graph) -> list[int]:
    """Visit order of MCS; ties go to the smallest label."""
    weight = {v: 0 for v in g.vertices}
    order = []
    left = set(g.vertices)
    while left:
        v = max(left, key=lambda x: (weight[x], -x))
        order.append(v)
        left.discard(v)
        for w in g.neighbors(v):
            if w in left:
                weight[w] += 1
    return order


def is_perfect_elimination_ordering(g: Graph, order: Sequence[int]) -> bool:
    """Zero fill-in check: each vertex's later neighbours form a clique."""
    pos = {v: i for i, v in enumerate(order)}
    if len(pos) != len(g.vertices) or set(pos) != set(g.vertices):
        return False
    for v in order:
        later = [w for w in g.neighbors(v) if pos[w] > pos[v]]
        if not later:
            continue
        u = min(later, key=pos.__getitem__)
        if any(w != u and not g.has_edge(u, w) for w in later):
            return False
    return True


def perfect_elimination_ordering(g: Graph) -> list[int] | None:
    order = maximum_cardinality_search(g)[::-1]
    return order if is_perfect_elimination_ordering(g, order) else None


def is_chordal(g: Graph) -> Verdict:
    """Chordality test; the witness is a perfect elimination ordering."""
    peo = perfect_elimination_ordering(g)
    return Verdict(peo is not None, peo)


def _require_peo(g: Graph) -> list[int]:
    peo = perfect_elimination_ordering(g)
    if peo is None:
        raise NotChordal("graph is not chordal")
    return peo


def maximal_cliques(g: Graph) -> list[tuple[int, ...]]:
    """Maximal cliques of a chordal graph, each sorted, list sorted."""
    peo = _require_peo(g)
    pos = {v: i for i, v in enumerate(peo)}
    cands = []
    for v in peo:
        cands.append(frozenset([v, *(w for w in g.neighbors(v) if pos[w] > pos[v])]))
    uniq = set(cands)
    cliques = [c for c in uniq if not any(c < d for d in uniq)]
    return sorted(tuple(sorted(c)) for c in cliques)


def is_decomposable(model: ModelSpec) -> bool:
    """Graphical (facets are the cliques of the independence graph) and chordal."""
    g = independence_graph(model)
    if not is_chordal(g):
        return False
    return set(maximal_cliques(g)) == set(model.facets)


# ---------------------------------------------------------------------------
# clique trees


@dataclass(frozen=True)
class CliqueTree:
    cliques: tuple[tuple[int, ...], ...]
    edges: tuple[tuple[int, int], ...]

    def __init__(self, cliques: Iterable[Iterable[int]], edges: Iterable[Sequence[int]]):
        object.__setattr__(self, "cliques", tuple(tuple(sorted(c)) for c in cliques))
        object.__setattr__(self, "edges", tuple(sorted((min(a, b), max(a, b)) for a, b in edges)))

    def separator(self, edge: tuple[int, int]) -> tuple[int, ...]:
        a, b = edge
        return tuple(sorted(set(self.cliques[a]) & set(self.cliques[b])))

    @property
    def separators(self) -> list[tuple[int, ...]]:
        return [self.separator(e) for e in self.edges]

    def degree(self, node: int) -> int:
        return sum(node in e for e in self.edges)

    def leaves(self) -> list[int]:
        return [i for i in range(len(self.cliques)) if self.degree(i) == 1]

    def _adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {i: [] for i in range(len(self.cliques))}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def is_tree(self) -> bool:
        k = len(self.cliques)
        if len(self.edges) != k - 1:
            return False
        adj = self._adjacency()
        seen, stack = {0}, [0]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == k

    def path(self, s: int, t: int) -> list[int]:
        adj = self._adjacency()
        prev = {s: None}
        stack = [s]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in prev:
                    prev[w] = u
                    stack.append(w)
        out = [t]
        while out[-1] != s:
            out.append(prev[out[-1]])
        return out[::-1]

    def has_running_intersection(self) -> bool:
        if not self.is_tree():
            return False
        for s, t in itertools.combinations(range(len(self.cliques)), 2):
            common = set(self.cliques[s]) & set(self.cliques[t])
            if common and not all(common <= set(self.cliques[u]) for u in self.path(s, t)):
                return False
        return True

    def sides(self, edge: tuple[int, int]) -> tuple[frozenset[int], frozenset[int]]:
        """Variables covered by each of the two subtrees left after cutting ``edge``."""
        a, b = edge
        adj = self._adjacency()
        seen, stack = {a}, [a]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen and w != b:
                    seen.add(w)
                    stack.append(w)
        left = frozenset(v for i in seen for v in self.cliques[i])
        right = frozenset(v for i in range(len(self.cliques)) if i not in seen for v in self.cliques[i])
        return left, right

    def to_dot(self, one_based: bool = True) -> str:
        off = 1 if one_based else 0

        def label(c):
            return "{" + ",".join(str(v + off) for v in c) + "}"

        lines = ["graph clique_tree {"]
        for i, c in enumerate(self.cliques):
            lines.append(f'  c{i} [label="{label(c)}"];')
        for e in self.edges:
            lines.append(f'  c{e[0]} -- c{e[1]} [label="{label(self.separator(e))}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def _weighted_pairs(cliques: Sequence[tuple[int, ...]]) -> list[tuple[int, int, int]]:
    return [
        (len(set(cliques[i]) & set(cliques[j])), i, j)
        for i, j in itertools.combinations(range(len(cliques)), 2)
    ]


def clique_tree(g: Graph) -> CliqueTree:
    """Maximum-weight spanning tree of the clique intersection graph.

    Weight-zero edges are allowed, so disconnected graphs get one tree whose
    empty separators join the components.  Ties go to the lexicographically
    smallest clique-index pair.
    """
    cliques = maximal_cliques(g)
    uf = _UnionFind(len(cliques))
    chosen = []
    for w, i, j in sorted(_weighted_pairs(cliques), key=lambda t: (-t[0], t[1], t[2])):
        if uf.union(i, j):
            chosen.append((i, j))
    return CliqueTree(cliques, chosen)


def _forest_subsets(edges, roots, need):
    """Subsets of ``need`` edges that stay acyclic over the component labels ``roots``."""
    for combo in itertools.combinations(edges, need):
        uf = {}

        def find(x):
            while uf.get(x, x) != x:
                x = uf[x]
            return x

        ok = True
        for _, i, j in combo:
            ri, rj = find(roots[i]), find(roots[j])
            if ri == rj:
                ok = False
                break
            uf[max(ri, rj)] = min(ri, rj)
        if ok:
            yield combo


def _iter_max_spanning_trees(cliques):
    k = len(cliques)
    by_w: dict[int, list] = {}
    for t in _weighted_pairs(cliques):
        by_w.setdefault(t[0], []).append(t)
    classes = [by_w[w] for w in sorted(by_w, reverse=True)]

    def rec(ci, roots, chosen):
        if ci == len(classes):
            if len(chosen) == k - 1:
                yield chosen
            return
        edges = [e for e in classes[ci] if roots[e[1]] != roots[e[2]]]
        uf = _UnionFind(k)
        need = sum(uf.union(roots[i], roots[j]) for _, i, j in edges)
        for combo in _forest_subsets(edges, roots, need):
            uf = _UnionFind(k)
            for _, i, j in combo:
                uf.union(roots[i], roots[j])
            new_roots = tuple(uf.find(r) for r in roots)
            yield from rec(ci + 1, new_roots, chosen + [(i, j) for _, i, j in combo])

    yield from rec(0, tuple(range(k)), [])


def enumerate_clique_trees(g: Graph, cap: int = 10_000) -> list[CliqueTree]:
    """All clique trees of a chordal graph, at most ``cap`` of them.

    Clique trees are exactly the maximum-weight spanning trees of the clique
    intersection graph; each candidate is re-checked for running
    intersection before it is returned.
    """
    cliques = maximal_cliques(g)
    out = []
    for edges in _iter_max_spanning_trees(cliques):
        tree = CliqueTree(cliques, edges)
        if tree.has_running_intersection():
            out.append(tree)
            if len(out) >= cap:
                break
    return out


# ---------------------------------------------------------------------------
# boundary cliques and the elimination order


class BoundaryClique(NamedTuple):
    clique: tuple[int, ...]
    simp: tuple[int, ...]
    sep: tuple[int, ...]


def simplicial_split(g: Graph) -> list[BoundaryClique]:
    """Every maximal clique with its simplicial and non-simplicial vertices."""
    cliques = maximal_cliques(g)
    count = {v: 0 for v in g.vertices}
    for c in cliques:
        for v in c:
            count[v] += 1
    return [
        BoundaryClique(c, tuple(v for v in c if count[v] == 1), tuple(v for v in c if count[v] > 1))
        for c in cliques
    ]


def boundary_cliques(g: Graph) -> list[BoundaryClique]:
    """Simplicial cliques D with another clique D' such that Sep(D) = D & D'.

    A graph with a single clique returns that clique (all vertices simplicial).
    """
    split = simplicial_split(g)
    if len(split) == 1:
        return split
    out = []
    for bc in split:
        if not bc.simp:
            continue
        sep = set(bc.sep)
        if any(set(bc.clique) & set(o.clique) == sep for o in split if o.clique != bc.clique):
            out.append(bc)
    return out


def elimination_variable_order(g: Graph) -> list[int]:
    """Variables ordered by recursively peeling boundary cliques.

    The boundary clique whose smallest simplicial vertex is minimal goes
    first; its simplicial vertices are emitted in ascending order.
    """
    _require_peo(g)
    order: list[int] = []
    cur = g
    while cur.vertices:
        bc = min(boundary_cliques(cur), key=lambda b: b.simp[0])
        order.extend(bc.simp)
        cur = cur.induced(set(cur.vertices) - set(bc.simp))
    return order
