"""Markov bases built from degree-two fibers.

Four families live here: minimal bases (a spanning tree on every fiber
with two or more members), the clique-tree bases of Dobra, minimal bases
invariant under level relabeling (one orbit per GF(2) basis vector) and
the doubling construction that turns a GF(2) basis back into a minimal
basis.  ``is_markov_basis`` checks any move set against brute-force fibers.
"""

from __future__ import annotations

import itertools
import random
import warnings
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .chordal import CliqueTree, clique_tree, independence_graph, is_chordal, is_decomposable
from .core import ModelSpec, Move, Table, Verdict, compute_b
from .errors import NotABasis, NotDecomposable
from .fiber2 import (
    FiberKey,
    enumerate_all_degree2_fibers,
    enumerate_representative_fibers,
    independent_triple,
    minimal_bases_nonunique,
)
from .oracle import fiber_graph_connected, iter_fibers
from .order import TermOrder

POLICIES = ("star", "path", "random")
FLAVORS = ("staircase", "standard")


@dataclass(frozen=True)
class MarkovBasis:
    """A sign-free set of moves with a provenance tag.

    ``keys`` (when present) runs parallel to ``moves`` and names the fiber
    each move lives in.  ``degree_two_only`` marks sets built for a model
    whose independence graph is not decomposable: they connect every
    degree-two fiber but may fail at higher degree.
    """

    moves: tuple[Move, ...]
    provenance: str
    keys: tuple[FiberKey, ...] | None = None
    degree_two_only: bool = False

    def __len__(self) -> int:
        return len(self.moves)

    def __iter__(self) -> Iterator[Move]:
        return iter(self.moves)

    def __contains__(self, z: object) -> bool:
        return z in set(self.moves)

    def without(self, z: Move) -> "MarkovBasis":
        keep = [i for i, w in enumerate(self.moves) if w != z]
        keys = tuple(self.keys[i] for i in keep) if self.keys is not None else None
        return MarkovBasis(tuple(self.moves[i] for i in keep), self.provenance, keys, self.degree_two_only)


def _collect(pairs: Iterable[tuple[Move, FiberKey]], provenance: str, degree_two_only: bool) -> MarkovBasis:
    seen: dict[Move, FiberKey] = {}
    for z, key in pairs:
        seen.setdefault(z, key)
    order = sorted(seen, key=lambda z: (seen[z].sort_key(), z))
    return MarkovBasis(tuple(order), provenance, tuple(seen[z] for z in order), degree_two_only)


def _decomposable_or_warn(model: ModelSpec, what: str) -> bool:
    if is_decomposable(model):
        return False
    warnings.warn(
        f"{what}: model is not decomposable; the moves connect degree-two fibers only",
        stacklevel=3,
    )
    return True


def _require_decomposable(model: ModelSpec) -> None:
    if not is_decomposable(model):
        raise NotDecomposable(f"generating class {model.facets} is not decomposable")


def default_order(model: ModelSpec) -> TermOrder:
    """Boundary-clique order when the graph is chordal, natural order otherwise."""
    if is_chordal(independence_graph(model)):
        return TermOrder(model)
    return TermOrder(model, variable_order=range(model.m))


# ---------------------------------------------------------------------------
# minimal bases


def _parse_policy(policy: str) -> tuple[str, int | None]:
    name, _, seed = policy.partition(":")
    if name not in POLICIES:
        raise ValueError(f"unknown tree policy {policy!r}; use star, path or random:SEED")
    if name == "random":
        return name, int(seed) if seed else 0
    if seed:
        raise ValueError(f"policy {name!r} takes no seed")
    return name, None


def spanning_tree_moves(members: Sequence[Table], policy: str = "star", order: TermOrder | None = None,
                        rng: random.Random | None = None) -> list[Move]:
    """Edges of a spanning tree on one fiber, as moves."""
    name, seed = _parse_policy(policy)
    members = list(members)
    if len(members) < 2:
        return []
    if name == "star":
        if order is None:
            raise ValueError("the star policy needs a term order")
        centre = order.minimum(members)
        return [Move.between(n, centre) for n in members if n != centre]
    if name == "path":
        members.sort()
        return [Move.between(a, b) for a, b in zip(members, members[1:])]
    rng = rng or random.Random(seed)
    members.sort()
    rng.shuffle(members)
    return [Move.between(members[i], members[rng.randrange(i)]) for i in range(1, len(members))]


def minimal_basis(model: ModelSpec, policy: str = "star", order: TermOrder | None = None,
                  cap: int | None = None) -> MarkovBasis:
    """A spanning tree on every degree-two fiber with two or more members.

    ``policy`` is ``star`` (all members joined to the term-order minimum),
    ``path`` (members chained in sorted order) or ``random:SEED``.
    """
    name, seed = _parse_policy(policy)
    partial = _decomposable_or_warn(model, "minimal_basis")
    if name == "star" and order is None:
        order = default_order(model)
    rng = random.Random(seed) if name == "random" else None
    pairs = []
    for key in enumerate_all_degree2_fibers(model, cap):
        for z in spanning_tree_moves(key.members(), policy, order, rng):
            pairs.append((z, key))
    return _collect(pairs, f"minimal-{name}", partial)


# ---------------------------------------------------------------------------
# clique-tree bases


def _assemble(parts: dict[int, int], m: int) -> tuple[int, ...]:
    return tuple(parts[v] for v in range(m))


def dobra_edge_moves(model: ModelSpec, tree: CliqueTree, edge: tuple[int, int]) -> list[Move]:
    """Every basic move swapping the two sides of one clique-tree edge."""
    sep = tree.separator(edge)
    left, right = tree.sides(edge)
    vs = sorted(left - set(sep))
    ws = sorted(right - set(sep))
    if not vs or not ws:
        return []
    lv = [model.levels[v] for v in vs]
    lw = [model.levels[w] for w in ws]
    out = []
    for s in itertools.product(*(range(model.levels[v]) for v in sep)):
        base = dict(zip(sep, s))

        def cell(a, b):
            parts = dict(base)
            parts.update(zip(vs, a))
            parts.update(zip(ws, b))
            return _assemble(parts, model.m)

        for iv, jv in itertools.combinations(itertools.product(*(range(x) for x in lv)), 2):
            for iw, jw in itertools.combinations(itertools.product(*(range(x) for x in lw)), 2):
                pos = Table.from_cells([cell(iv, iw), cell(jv, jw)])
                neg = Table.from_cells([cell(iv, jw), cell(jv, iw)])
                out.append(Move(pos, neg))
    return out


def dobra_basis(model: ModelSpec, tree: CliqueTree | None = None) -> MarkovBasis:
    """Union over clique-tree edges of the basic moves across each edge."""
    _require_decomposable(model)
    if tree is None:
        tree = clique_tree(independence_graph(model))
    _check_tree(model, tree)
    moves = sorted({z for e in tree.edges for z in dobra_edge_moves(model, tree, e)})
    label = "|".join("-".join(str(i) for i in e) for e in tree.edges)
    return MarkovBasis(tuple(moves), f"dobra({label})")


def _check_tree(model: ModelSpec, tree: CliqueTree) -> None:
    if sorted(tree.cliques) != sorted(model.facets):
        raise ValueError("clique tree nodes are not the facets of the model")
    if not tree.has_running_intersection():
        raise ValueError("clique tree lacks the running-intersection property")


def moves_in_fiber(moves: Iterable[Move], key: FiberKey, model: ModelSpec) -> list[Move]:
    """Degree-two moves whose parts both have marginals ``key.b``."""
    return [z for z in moves if z.degree == 2 and compute_b(z.pos, model) == key.b]


def dobra_is_minimal(model: ModelSpec, tree: CliqueTree | None = None) -> Verdict:
    """Does some clique tree give a minimal basis?

    That happens exactly when minimal bases are unique.  When it does not,
    the witness is ``(key, moves)``: a four-member fiber on three mutually
    non-adjacent variables and the clique-tree moves inside it (at least
    four, one more than a spanning tree needs).
    """
    _require_decomposable(model)
    if not minimal_bases_nonunique(model):
        return Verdict(True, None)
    triple = independent_triple(independence_graph(model))
    key = next(k for k in enumerate_representative_fibers(model) if k.nondegenerate == triple)
    basis = dobra_basis(model, tree)
    return Verdict(False, (key, moves_in_fiber(basis, key, model)))


# ---------------------------------------------------------------------------
# GF(2)


def gf2_rank(vectors: Iterable[Sequence[int]]) -> int:
    """Rank over GF(2) of bit vectors (Gaussian elimination on int bitsets)."""
    pivots: dict[int, int] = {}
    rank = 0
    for vec in vectors:
        x = int("".join(str(int(b) & 1) for b in vec) or "0", 2)
        while x:
            top = x.bit_length() - 1
            if top not in pivots:
                pivots[top] = x
                rank += 1
                break
            x ^= pivots[top]
    return rank


def gf2_default_basis(c: int, flavor: str = "staircase") -> list[tuple[int, ...]]:
    """``c - 1`` independent vectors of length ``c - 1``.

    ``staircase``: 111, 011, 001 (for c = 4); ``standard``: unit vectors.
    """
    if c < 2:
        raise ValueError("a GF(2) basis needs at least two components")
    n = c - 1
    if flavor == "staircase":
        return [tuple(0 if i < k else 1 for i in range(n)) for k in range(n)]
    if flavor == "standard":
        return [tuple(1 if i == k else 0 for i in range(n)) for k in range(n)]
    raise ValueError(f"unknown flavor {flavor!r}; use staircase or standard")


def random_gf2_basis(c: int, rng: random.Random) -> list[tuple[int, ...]]:
    """A uniformly drawn ordered basis of ``GF(2)^(c-1)``."""
    n = c - 1
    out: list[tuple[int, ...]] = []
    while len(out) < n:
        v = tuple(rng.randrange(2) for _ in range(n))
        if gf2_rank(out + [v]) == len(out) + 1:
            out.append(v)
    return out


# ---------------------------------------------------------------------------
# invariant bases


@dataclass(frozen=True)
class Orbit:
    """Orbit of one representative move under relabeling of levels."""

    key: FiberKey
    vector: tuple[int, ...]
    representative: Move
    moves: tuple[Move, ...] = field(repr=False)

    def __len__(self) -> int:
        return len(self.moves)


@dataclass(frozen=True)
class OrbitAnnotatedBasis:
    orbits: tuple[Orbit, ...]
    flavor: str
    degree_two_only: bool = False

    def __len__(self) -> int:
        return len(self.orbits)

    def moves(self) -> list[Move]:
        return sorted({z for o in self.orbits for z in o.moves})

    def representatives(self) -> list[Move]:
        return [o.representative for o in self.orbits]

    def kappa(self, key: FiberKey) -> int:
        return sum(o.key == key for o in self.orbits)

    def as_basis(self) -> MarkovBasis:
        return MarkovBasis(tuple(self.moves()), f"invariant({self.flavor})", None, self.degree_two_only)


def _transpositions(levels: Sequence[int]) -> list[list[list[int]]]:
    gens = []
    for d, n in enumerate(levels):
        for a in range(n - 1):
            perms = [list(range(x)) for x in levels]
            perms[d][a], perms[d][a + 1] = a + 1, a
            gens.append(perms)
    return gens


def orbit(z: Move, levels: Sequence[int]) -> list[Move]:
    """All images of ``z`` (up to sign) under independent level permutations.

    Breadth-first search over adjacent transpositions, which generate the
    full product of symmetric groups.
    """
    gens = _transpositions(levels)
    seen = {z}
    queue = deque([z])
    while queue:
        w = queue.popleft()
        for g in gens:
            u = w.relabel(g)
            if u not in seen:
                seen.add(u)
                queue.append(u)
    return sorted(seen)


def representative_moves(key: FiberKey, vectors: Sequence[Sequence[int]]) -> list[Move]:
    """``n0 - g_v(n0)`` for each GF(2) vector, ``n0`` the base member."""
    n0 = key.member()
    return [Move.between(n0, key.act(n0, v)) for v in vectors]


def invariant_basis(model: ModelSpec, flavor: str = "staircase") -> OrbitAnnotatedBasis:
    """A minimal relabeling-invariant basis: ``c - 1`` orbits per representative fiber."""
    partial = _decomposable_or_warn(model, "invariant_basis")
    orbits = []
    for key in enumerate_representative_fibers(model):
        vectors = gf2_default_basis(key.c, flavor)
        for v, z in zip(vectors, representative_moves(key, vectors)):
            orbits.append(Orbit(key, tuple(v), z, tuple(orbit(z, model.levels))))
    return OrbitAnnotatedBasis(tuple(orbits), flavor, partial)


def _member_bits(key: FiberKey) -> dict[Table, tuple[int, ...]]:
    return {key.member(bits): bits for bits in itertools.product((0, 1), repeat=key.c - 1)}


def stabilizer_orbits(moves: Iterable[Move], key: FiberKey) -> list[tuple[int, ...]]:
    """Orbits of in-fiber moves under the component flips of ``key``.

    Flipping components acts on members by adding a fixed GF(2) vector, so
    the orbit of a move is named by the difference of its endpoints.
    """
    bits = _member_bits(key)
    out = set()
    for z in moves:
        if z.pos in bits and z.neg in bits:
            out.add(tuple(a ^ b for a, b in zip(bits[z.pos], bits[z.neg])))
    return sorted(out)


def dobra_is_minimal_invariant(tree: CliqueTree, model: ModelSpec | None = None) -> Verdict:
    """Is the clique-tree basis a minimal invariant basis?

    True exactly when the tree is a path (at most two leaves).  Otherwise
    the witness is ``(key, orbits)``: a representative fiber in which the
    clique-tree moves fall into more than ``c - 1`` orbits.  Without a model,
    binary variables are assumed.
    """
    if len(tree.leaves()) <= 2:
        return Verdict(True, None)
    if model is None:
        m = max(v for c in tree.cliques for v in c) + 1
        model = ModelSpec([2] * m, tree.cliques)
    basis = dobra_basis(model, tree)
    for key in enumerate_representative_fibers(model):
        orbs = stabilizer_orbits(moves_in_fiber(basis, key, model), key)
        if len(orbs) > key.c - 1:
            return Verdict(False, (key, orbs))
    raise AssertionError("tree with three leaves but no excess orbit found")


# ---------------------------------------------------------------------------
# doubling construction


def algorithm1_trace(key: FiberKey, vectors: Sequence[Sequence[int]], start: Table | None = None):
    """Run the doubling construction; returns ``(members, moves)``.

    Step ``k`` applies the ``k``-th group element to every member found so
    far, doubling the list and adding one move per new member.
    """
    n = key.c - 1
    vectors = [tuple(v) for v in vectors]
    if len(vectors) != n or any(len(v) != n for v in vectors) or gf2_rank(vectors) != n:
        raise NotABasis(f"{vectors} is not a basis of GF(2)^{n}")
    members = [start if start is not None else key.member()]
    moves = []
    for v in vectors:
        size = len(members)
        for l in range(size):
            new = key.act(members[l], v)
            members.append(new)
            moves.append(Move.between(members[l], new))
    return members, moves


def algorithm1(key: FiberKey, vectors: Sequence[Sequence[int]], start: Table | None = None) -> list[Move]:
    """``2**(c-1) - 1`` moves forming a spanning tree of the fiber."""
    return algorithm1_trace(key, vectors, start)[1]


def minimal_basis_from_invariant(model: ModelSpec, flavor: str = "staircase",
                                 cap: int | None = None) -> MarkovBasis:
    """Doubling construction on every fiber, transporting the GF(2) basis."""
    partial = _decomposable_or_warn(model, "minimal_basis_from_invariant")
    pairs = []
    for key in enumerate_all_degree2_fibers(model, cap):
        for z in algorithm1(key, gf2_default_basis(key.c, flavor)):
            pairs.append((z, key))
    return _collect(pairs, "algorithm1", partial)


# ---------------------------------------------------------------------------
# verification


def is_markov_basis(model: ModelSpec, moves: Iterable[Move], degree_cap: int = 2,
                    fibers: dict[int, list[list[Table]]] | None = None) -> Verdict:
    """Brute-force connectivity of every fiber of degree ``2..degree_cap``.

    Witness on failure: ``(degree, components)`` for the first fiber that
    splits.  ``fibers`` may carry precomputed ``iter_fibers`` output keyed
    by degree.
    """
    moves = list(moves)
    for d in range(2, degree_cap + 1):
        groups = fibers[d] if fibers is not None and d in fibers else iter_fibers(model, d)
        for members in groups:
            if len(members) < 2:
                continue
            verdict = fiber_graph_connected(members, moves)
            if not verdict:
                return Verdict(False, (d, verdict.witness))
    return Verdict(True, None)
