"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -v`` (the summary
lines appear at the end of the run) or ``python3 tests/test_acceptance.py``.
"""

import itertools
import random
import sys
import time
from collections import Counter

import networkx as nx
import numpy as np
import pytest

from conftest import random_model, report
from mbk.bases import (
    algorithm1_trace,
    dobra_basis,
    dobra_is_minimal_invariant,
    gf2_default_basis,
    invariant_basis,
    is_markov_basis,
    minimal_basis,
    minimal_basis_from_invariant,
    moves_in_fiber,
    random_gf2_basis,
    stabilizer_orbits,
)
from mbk.chordal import CliqueTree, Graph, independence_graph, is_decomposable, maximal_cliques
from mbk.core import ModelSpec, Move, Table
from mbk.fiber2 import (
    boundary_clique_unique,
    enumerate_all_degree2_fibers,
    enumerate_representative_fibers,
)
from mbk.groebner import groebner_basis, is_groebner_empirically
from mbk.oracle import (
    degree_two_fiber_sizes,
    enumerate_fiber_bruteforce,
    fiber_graph_connected,
    induced_component_scan,
    iter_consistent_degree_two_keys,
    iter_fibers,
)
from mbk.order import TermOrder
from mbk.sampler import ChainConfig, batch_means_se, run_chain

N_RANDOM_MODELS = 500


def _key(model, keys, nd):
    return next(k for k in keys if k.nondegenerate == nd)


# ---------------------------------------------------------------------------
# 1. fiber sizes of degree-two marginal vectors


@pytest.fixture(scope="module")
def fiber_size_sweep():
    rng = random.Random(20240601)
    start = time.perf_counter()
    stats = Counter()
    mismatched_nonempty = []
    empty_on_decomposable = []
    first_empty = None
    for _ in range(N_RANDOM_MODELS):
        model = random_model(rng)
        g = independence_graph(model)
        decomposable = is_decomposable(model)
        stats["models"] += 1
        stats["decomposable"] += decomposable
        sizes = degree_two_fiber_sizes(model)
        expected = {}
        n_b = n_match = 0
        for nd, key in iter_consistent_degree_two_keys(model):
            if not nd:
                continue
            want = expected.get(nd)
            if want is None:
                want = expected[nd] = 2 ** (len(g.components(nd)) - 1)
            found = sizes.get(key, 0)
            n_b += 1
            if found == want:
                n_match += 1
            elif found == 0:
                stats["empty"] += 1
                if decomposable:
                    empty_on_decomposable.append((model, key))
                elif first_empty is None:
                    first_empty = (model, key)
            else:
                mismatched_nonempty.append((model, key, found, want))
        stats["b"] += n_b
        stats["match"] += n_match
    stats["seconds"] = time.perf_counter() - start
    return stats, mismatched_nonempty, empty_on_decomposable, first_empty


def test_criterion_1_nonempty_fibers(fiber_size_sweep):
    stats, mismatched, empty_dec, _ = fiber_size_sweep
    ok = (
        stats["models"] >= 500
        and not mismatched
        and not empty_dec
        and stats["seconds"] < 60
    )
    report(
        "1a",
        ok,
        f"{stats['models']} random models, {stats['b']} consistent b; every nonempty fiber has "
        f"2^(c-1) members ({len(mismatched)} mismatches); decomposable models: every consistent b "
        f"realized ({len(empty_dec)} exceptions); {stats['seconds']:.1f}s",
    )
    assert stats["models"] >= 500
    assert not mismatched
    assert not empty_dec
    assert stats["seconds"] < 60


@pytest.mark.xfail(strict=True, reason="consistent degree-two margins need not be realizable on "
                                       "non-decomposable classes, e.g. a triangle of pairwise facets")
def test_criterion_1_all_consistent(fiber_size_sweep):
    stats, mismatched, _, first_empty = fiber_size_sweep
    ok = stats["match"] == stats["b"]
    detail = f"{stats['match']}/{stats['b']} consistent b have 2^(c-1) members"
    if first_empty is not None:
        model, key = first_empty
        detail += f"; {stats['empty']} are unrealizable, e.g. facets {model.facets} with {key}"
    report("1", ok, detail)
    assert ok


def test_criterion_1_counterexample():
    """The smallest unrealizable consistent vector: a triangle of pairwise facets."""
    model = ModelSpec([2, 2, 2], [[0, 1], [1, 2], [0, 2]])
    from mbk.core import MarginalVector, is_consistent
    from mbk.errors import Inconsistent
    from mbk.fiber2 import fiber_key

    b = MarginalVector(model.facets, [
        {(0, 0): 1, (1, 1): 1},   # variables 1,2 equal
        {(0, 0): 1, (1, 1): 1},   # variables 1,3 equal
        {(0, 1): 1, (1, 0): 1},   # variables 2,3 differ
    ])
    assert is_consistent(b)
    assert enumerate_fiber_bruteforce(b, model) == []
    with pytest.raises(Inconsistent):
        fiber_key(b, model)


# ---------------------------------------------------------------------------
# 2. three-way complete independence


def test_criterion_2(ci3):
    keys = enumerate_all_degree2_fibers(ci3)
    brute = sum(n >= 2 for n in degree_two_fiber_sizes(ci3).values())
    nd_sets = Counter(k.nondegenerate for k in keys)
    expected_nd = Counter({(0, 1, 2): 1, (0, 1): 2, (1, 2): 2, (0, 2): 2})
    k1 = _key(ci3, keys, (0, 1, 2))
    members = enumerate_fiber_bruteforce(k1.b, ci3)
    n_expected = [Table.from_cells([(0, 0, 0), (1, 1, 1)]), Table.from_cells([(0, 0, 1), (1, 1, 0)]),
               Table.from_cells([(0, 1, 0), (1, 0, 1)]), Table.from_cells([(0, 1, 1), (1, 0, 0)])]
    basis = minimal_basis(ci3)
    oracle_total = sum(len(f) - 1 for f in iter_fibers(ci3, 2))
    ok = (len(keys) == 7 and brute == 7 and nd_sets == expected_nd and len(members) == 4
          and sorted(members) == sorted(n_expected) and k1.members() == n_expected
          and len(basis) == 9 and oracle_total == 9)
    report("2", ok, f"|B_nd|={len(keys)} (brute {brute}), nondegenerate sets ok={nd_sets == expected_nd}, "
                    f"|F_b1|={len(members)}, minimal basis {len(basis)} moves (oracle {oracle_total})")
    assert ok


# ---------------------------------------------------------------------------
# 3. four-way complete independence, chain clique tree


def test_criterion_3(ci4):
    chain = CliqueTree([(0,), (1,), (2,), (3,)], [(0, 1), (1, 2), (2, 3)])
    key = _key(ci4, enumerate_representative_fibers(ci4), (0, 1, 2, 3))
    dobra_in_fiber = moves_in_fiber(dobra_basis(ci4, chain), key, ci4)
    members = enumerate_fiber_bruteforce(key.b, ci4)
    sizes = set()
    for policy in ("star", "path", "random:1", "random:2"):
        sizes.add(len(moves_in_fiber(minimal_basis(ci4, policy), key, ci4)))
    sizes.add(len(moves_in_fiber(minimal_basis_from_invariant(ci4), key, ci4)))
    sizes.add(len(moves_in_fiber(groebner_basis(ci4), key, ci4)))
    ok = len(dobra_in_fiber) == 12 and len(members) == 8 and sizes == {7}
    report("3", ok, f"clique-tree moves in fiber {len(dobra_in_fiber)}, |F_b|={len(members)}, "
                    f"minimal bases use {sorted(sizes)} moves there")
    assert ok


# ---------------------------------------------------------------------------
# 4. minimal invariant basis, three-way complete independence


def test_criterion_4(ci3):
    results = []
    for flavor in ("staircase", "standard"):
        inv = invariant_basis(ci3, flavor)
        k1 = _key(ci3, enumerate_representative_fibers(ci3), (0, 1, 2))
        results.append((len(inv), inv.kappa(k1), bool(is_markov_basis(ci3, inv.moves(), 3))))
    ok = all(r == (5, 2, True) for r in results)
    report("4", ok, f"(orbits, kappa(b1), Markov) per flavor: {results}")
    assert ok


# ---------------------------------------------------------------------------
# 5. clique-tree invariant minimality


def test_criterion_5(ci4):
    t1 = CliqueTree([(0,), (1,), (2,), (3,)], [(0, 1), (1, 2), (2, 3)])
    t2 = CliqueTree([(0,), (1,), (2,), (3,)], [(0, 3), (1, 3), (2, 3)])
    v1 = dobra_is_minimal_invariant(t1, ci4)
    v2 = dobra_is_minimal_invariant(t2, ci4)
    key = _key(ci4, enumerate_representative_fibers(ci4), (0, 1, 2))
    orbits1 = stabilizer_orbits(moves_in_fiber(dobra_basis(ci4, t1), key, ci4), key)
    orbits2 = stabilizer_orbits(moves_in_fiber(dobra_basis(ci4, t2), key, ci4), key)
    ok = bool(v1) and not v2 and len(orbits1) == 2 and len(orbits2) == 3 and key.c - 1 == 2
    report("5", ok, f"chain minimal={bool(v1)}, star minimal={bool(v2)}, orbits in fiber "
                    f"chain={len(orbits1)} star={len(orbits2)} vs kappa={key.c - 1}")
    assert ok


# ---------------------------------------------------------------------------
# 6. three uniqueness predicates on all chordal graphs with up to 8 vertices


def chordal_graphs_up_to(n_max: int = 8) -> list[nx.Graph]:
    """All chordal graphs on 1..n_max vertices up to isomorphism.

    The atlas covers up to seven vertices; larger graphs are grown by
    adding a simplicial vertex (joined to a clique, possibly empty) to every
    chordal graph one size smaller, then deduplicated by isomorphism.
    """
    graphs = [g for g in nx.graph_atlas_g() if g.number_of_nodes() >= 1 and nx.is_chordal(g)]
    layer = [g for g in graphs if g.number_of_nodes() == 7]
    for n in range(8, n_max + 1):
        buckets: dict[str, list[nx.Graph]] = {}
        grown = []
        for g in layer:
            cliques = {frozenset()}
            for c in nx.find_cliques(g):
                for k in range(1, len(c) + 1):
                    cliques.update(frozenset(s) for s in itertools.combinations(c, k))
            for c in cliques:
                h = g.copy()
                h.add_node(n - 1)
                h.add_edges_from((n - 1, v) for v in c)
                bucket = buckets.setdefault(nx.weisfeiler_lehman_graph_hash(h, iterations=3), [])
                if not any(nx.is_isomorphic(h, o) for o in bucket):
                    bucket.append(h)
                    grown.append(h)
        graphs += grown
        layer = grown
    return graphs


_PAIR_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _pairs(m: int):
    """All ``(j, x)`` with ``x`` a subset of ``j`` avoiding the lowest bit of ``j``."""
    if m not in _PAIR_CACHE:
        js, xs = [], []
        for j in range(1, 2 ** m):
            low = j & -j
            rest = j ^ low
            sub = rest
            while True:
                js.append(j)
                xs.append(sub)
                if sub == 0:
                    break
                sub = (sub - 1) & rest
        _PAIR_CACHE[m] = (np.array(js), np.array(xs))
    return _PAIR_CACHE[m]


def max_degree_two_fiber(n: int, cliques) -> int:
    """Largest degree-two fiber of the binary model on ``cliques``, by brute force.

    With every variable in some facet, one-way margins force any table
    sharing the margins of ``(0)(j)`` to be ``(x)(x xor j)`` with ``x``
    inside ``j``; each candidate is kept if all facet margins agree.  Level
    relabeling carries every other degree-two fiber onto one of these.
    """
    js, xs = _pairs(n)
    ok = np.ones(len(js), dtype=bool)
    for c in cliques:
        mask = sum(1 << v for v in c)
        a, b, jm = xs & mask, (xs ^ js) & mask, js & mask
        ok &= ((a == 0) & (b == jm)) | ((b == 0) & (a == jm))
    return int(np.bincount(js[ok]).max())


def test_criterion_6():
    start = time.perf_counter()
    graphs = chordal_graphs_up_to(8)
    per_n = Counter(g.number_of_nodes() for g in graphs)
    disagreements = []
    nonunique = 0
    for h in graphs:
        n = h.number_of_nodes()
        g = Graph.on(n, h.edges())
        cliques = maximal_cliques(g)
        by_boundary = not boundary_clique_unique(g)
        by_scan = induced_component_scan(g, max_parts=3) >= 3
        by_moves = max_degree_two_fiber(n, cliques) > 2
        nonunique += by_moves
        if not (by_boundary == by_scan == by_moves):
            disagreements.append((sorted(h.edges()), by_boundary, by_scan, by_moves))
    # known counts of chordal graphs on 1..8 vertices
    expected = {1: 1, 2: 2, 3: 4, 4: 10, 5: 27, 6: 94, 7: 393, 8: 2119}
    ok = not disagreements and dict(per_n) == expected
    report("6", ok, f"{len(graphs)} chordal graphs (per size {dict(sorted(per_n.items()))}), "
                    f"{nonunique} non-unique, {len(disagreements)} disagreements, "
                    f"{time.perf_counter() - start:.1f}s")
    assert dict(per_n) == expected
    assert not disagreements


# ---------------------------------------------------------------------------
# 7. Groebner conformance on 3x3 independence

TWISTED = {(0, 0): 1, (0, 1): 8, (0, 2): 6, (1, 0): 4, (1, 1): 2, (1, 2): 9, (2, 0): 7, (2, 1): 5, (2, 2): 3}


def basic_moves_3x3():
    out = set()
    for (r1, r2), (c1, c2) in itertools.product(itertools.combinations(range(3), 2), repeat=2):
        out.add(Move(Table.from_cells([(r1, c1), (r2, c2)]), Table.from_cells([(r1, c2), (r2, c1)])))
    return out


def test_criterion_7(indep33):
    order = TermOrder(indep33)
    gb = groebner_basis(indep33, order)
    nine = set(gb.moves) == basic_moves_3x3() and len(gb) == 9
    default_ok = is_groebner_empirically(gb, indep33, order, 4)
    twisted = TermOrder(indep33, kind="lex", cell_rank={c: n - 1 for c, n in TWISTED.items()})
    twisted_nine = is_groebner_empirically(gb, indep33, twisted, 3)
    cubic = Move(Table.from_cells([(0, 2), (1, 0), (2, 1)]), Table.from_cells([(0, 1), (1, 2), (2, 0)]))
    twisted_ten = is_groebner_empirically(list(gb) + [cubic], indep33, twisted, 3)
    ok = nine and bool(default_ok) and not twisted_nine and bool(twisted_ten)
    report("7", ok, f"nine basic moves={nine}, default order cap 4 {'pass' if default_ok else 'fail'}, "
                    f"twisted lex nine {'pass' if twisted_nine else 'fail'}, "
                    f"twisted lex plus cubic {'pass' if twisted_ten else 'fail'}")
    assert ok


# ---------------------------------------------------------------------------
# 8. doubling construction gives spanning trees


def test_criterion_8():
    rng = random.Random(8)
    models = [
        ModelSpec.complete_independence([2] * 5),
        ModelSpec([2] * 6, [[0, 3], [1, 4], [2, 5], [3, 4, 5]]),
        ModelSpec([3, 2, 2, 3, 2], [[0, 1], [1, 2], [3], [4]]),
    ]
    seen_c = Counter()
    failures = []
    for model in models:
        for key in enumerate_representative_fibers(model):
            if key.c not in (2, 3, 4, 5):
                continue
            members = enumerate_fiber_bruteforce(key.b, model)
            bases = [gf2_default_basis(key.c, "staircase"), gf2_default_basis(key.c, "standard")]
            bases += [random_gf2_basis(key.c, rng) for _ in range(50)]
            for vectors in bases:
                seen_c[key.c] += 1
                found, moves = algorithm1_trace(key, vectors)
                tree_ok = (
                    len(moves) == 2 ** (key.c - 1) - 1
                    and len(set(moves)) == len(moves)
                    and len(set(found)) == len(found) == len(members)
                    and set(found) == set(members)
                    and fiber_graph_connected(members, moves).ok
                )
                if not tree_ok:
                    failures.append((model.facets, key.nondegenerate, vectors))
    ok = not failures and set(seen_c) == {2, 3, 4, 5}
    report("8", ok, f"runs per c: {dict(sorted(seen_c.items()))}; {len(failures)} failures")
    assert ok


# ---------------------------------------------------------------------------
# 9. minimality of every minimal-basis construction

MINIMALITY_MODELS = [
    ModelSpec.complete_independence([2, 2, 2]),
    ModelSpec.complete_independence([2, 2, 2, 2]),
    ModelSpec.complete_independence([3, 3]),
    ModelSpec([3, 2, 2], [[0], [1, 2]]),
    ModelSpec([2, 3, 2], [[0, 1], [1, 2]]),
    ModelSpec([2, 2, 2, 2], [[0, 1], [1, 2], [2, 3]]),
    ModelSpec([2] * 5, [[0, 3], [1, 3], [2, 3, 4]]),
]


def test_criterion_9():
    checked = 0
    failures = []
    for model in MINIMALITY_MODELS:
        fibers = {d: iter_fibers(model, d) for d in (2, 3)}
        bases = {
            "star": minimal_basis(model, "star"),
            "path": minimal_basis(model, "path"),
            "random": minimal_basis(model, "random:5"),
            "algorithm1": minimal_basis_from_invariant(model, "staircase"),
            "algorithm1-standard": minimal_basis_from_invariant(model, "standard"),
            "groebner": groebner_basis(model),
        }
        for name, basis in bases.items():
            checked += 1
            if not is_markov_basis(model, basis, 3, fibers):
                failures.append((model.facets, name, "not a Markov basis"))
                continue
            for z in basis:
                if is_markov_basis(model, basis.without(z), 2, fibers):
                    failures.append((model.facets, name, f"redundant {z!r}"))
                    break
    ok = not failures
    report("9", ok, f"{checked} bases on {len(MINIMALITY_MODELS)} models connect all fibers up to "
                    f"degree 3 and lose connectivity without any single move; {len(failures)} failures")
    assert ok, failures


# ---------------------------------------------------------------------------
# 10. sampler on the four-member fiber


def test_criterion_10(ci3):
    start = time.perf_counter()
    key = _key(ci3, enumerate_representative_fibers(ci3), (0, 1, 2))
    members = key.members()
    moves = moves_in_fiber(groebner_basis(ci3), key, ci3)
    index = {t: i for i, t in enumerate(members)}
    results = []
    for seed in (101, 202):
        states = np.array([index[s] for s in run_chain(members[0], moves, ChainConfig(100_000, 0, 1, seed))])
        occ = np.bincount(states, minlength=4) / len(states)
        tv = 0.5 * np.abs(occ - 0.25).sum()
        x = (states == 0).astype(float)
        results.append((tv, x.mean(), batch_means_se(x)))
    (tv1, p1, se1), (tv2, p2, se2) = results
    agree = abs(p1 - p2) <= 3 * np.hypot(se1, se2)
    seconds = time.perf_counter() - start
    ok = max(tv1, tv2) <= 0.02 and agree and seconds < 10
    report("10", ok, f"TV to uniform {tv1:.4f} / {tv2:.4f}, occupancy of n1 {p1:.4f}+-{se1:.4f} vs "
                     f"{p2:.4f}+-{se2:.4f}, {seconds:.1f}s")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
