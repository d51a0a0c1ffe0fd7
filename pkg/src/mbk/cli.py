"""Command-line front end (``mbk``).

Reports print 1-based variable labels; every file read or written uses
0-based variables and levels.  Exit status: 0 success, 1 domain error or
failed verification, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import io
from .bases import (
    FLAVORS,
    dobra_basis,
    dobra_is_minimal,
    invariant_basis,
    is_markov_basis,
    minimal_basis,
)
from .chordal import (
    boundary_cliques,
    clique_tree,
    elimination_variable_order,
    enumerate_clique_trees,
    independence_graph,
    is_chordal,
    is_decomposable,
    maximal_cliques,
)
from .errors import MarkovBasisError
from .fiber2 import (
    enumerate_all_degree2_fibers,
    enumerate_fiber,
    enumerate_representative_fibers,
    minimal_bases_nonunique,
)
from .groebner import groebner_basis, is_groebner_empirically, is_reduced
from .oracle import iter_fibers
from .order import TermOrder
from .sampler import ChainConfig, exact_test


class UsageError(Exception):
    pass


def _label(vs) -> str:
    return "{" + ",".join(str(v + 1) for v in vs) + "}"


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(path: str, parse, *args):
    try:
        return parse(io.read_json(path), *args)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc
    except io.FormatError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _model(args):
    return _load(args.model, io.model_from_json)


def _write_moves(args, moves, orbits=None) -> None:
    text = json.dumps(io.moves_to_json(moves, orbits), indent=1) + "\n"
    if args.out:
        _emit(text, args.out)


# ---------------------------------------------------------------------------
# subcommands


def cmd_analyze(args) -> int:
    model = _model(args)
    g = independence_graph(model)
    chordal = is_chordal(g)
    print(f"variables: {model.m}  levels: {list(model.levels)}  cells: {model.n_cells}")
    print("facets: " + " ".join(_label(f) for f in model.facets))
    print(f"chordal: {'yes' if chordal else 'no'}")
    print(f"decomposable: {'yes' if is_decomposable(model) else 'no'}")
    nonunique = minimal_bases_nonunique(model)
    print(f"minimal basis: {'non-unique' if nonunique else 'unique'}")
    if not chordal:
        return 0
    print("cliques: " + " ".join(_label(c) for c in maximal_cliques(g)))
    tree = clique_tree(g)
    print("separators: " + " ".join(_label(s) for s in tree.separators))
    for bc in boundary_cliques(g):
        print(f"boundary clique {_label(bc.clique)}: simp={_label(bc.simp)} sep={_label(bc.sep)}")
    print("clique tree edges: " + " ".join(f"{_label(tree.cliques[a])}-{_label(tree.cliques[b])}" for a, b in tree.edges))
    print(f"clique tree leaves: {len(tree.leaves())}")
    print(f"clique trees: {len(enumerate_clique_trees(g, cap=args.tree_cap))}")
    print("elimination order: " + " ".join(str(v + 1) for v in elimination_variable_order(g)))
    if args.dot:
        _emit(tree.to_dot(), args.dot)
    return 0


def cmd_fibers(args) -> int:
    model = _model(args)
    if args.b:
        b = _load(args.b, io.margins_from_json, model)
        fiber = enumerate_fiber(b, model)
        print(fiber.key.describe())
        for t in fiber.members:
            print(f"  {t!r}")
        return 0
    keys = enumerate_representative_fibers(model) if args.representative else enumerate_all_degree2_fibers(model)
    print(f"fibers: {len(keys)}")
    for key in keys:
        print(key.describe())
        if args.members:
            for t in key.members():
                print(f"  {t!r}")
    return 0


def cmd_min_basis(args) -> int:
    model = _model(args)
    policy = args.policy
    if policy == "random":
        policy = f"random:{args.seed}"
    basis = minimal_basis(model, policy)
    print(f"{basis.provenance}: {len(basis)} moves" + (" (degree two only)" if basis.degree_two_only else ""))
    _write_moves(args, basis.moves)
    return 0


def cmd_dobra(args) -> int:
    model = _model(args)
    tree = _load(args.tree, io.tree_from_json) if args.tree else None
    basis = dobra_basis(model, tree)
    print(f"dobra: {len(basis)} moves")
    minimal = dobra_is_minimal(model)
    print(f"some clique tree gives a minimal basis: {'yes' if minimal else 'no'}")
    _write_moves(args, basis.moves)
    return 0


def cmd_invariant_basis(args) -> int:
    model = _model(args)
    inv = invariant_basis(model, args.flavor)
    print(f"orbits: {len(inv)}  moves: {len(inv.moves())}")
    for k, o in enumerate(inv.orbits):
        print(f"orbit {k}: {o.key.describe()} vector={''.join(map(str, o.vector))} orbit_size={len(o)} rep={o.representative!r}")
    if args.out:
        moves, orbits = [], []
        for k, o in enumerate(inv.orbits):
            for z in (o.moves if not args.representatives else [o.representative]):
                moves.append(z)
                orbits.append(k)
        _write_moves(args, moves, orbits)
    return 0


def cmd_groebner(args) -> int:
    model = _model(args)
    order = TermOrder(model)
    basis = groebner_basis(model, order)
    print(f"groebner: {len(basis)} moves")
    print("variable order: " + " ".join(str(v + 1) for v in order.variable_order))
    status = 0
    if args.verify_cap >= 2:
        for d in range(2, args.verify_cap + 1):
            n = sum(len(f) > 1 for f in iter_fibers(model, d))
            print(f"degree {d}: {n} fibers with two or more members")
        verdict = is_groebner_empirically(basis, model, order, args.verify_cap)
        print(f"normal forms up to degree {args.verify_cap}: {'PASS' if verdict else 'FAIL'}")
        if not verdict:
            t, nf, low = verdict.witness
            print(f"  {t!r} reduces to {nf!r}, fiber minimum {low!r}")
            status = 1
        reduced = is_reduced(basis, order)
        print(f"reduced: {'PASS' if reduced else 'FAIL'}")
        status = status or (0 if reduced else 1)
    _write_moves(args, basis.moves)
    return status


def cmd_check_unique(args) -> int:
    model = _model(args)
    verdict = minimal_bases_nonunique(model)
    if verdict:
        a, b, c = verdict.witness
        print(f"non-unique: variables {a + 1}, {b + 1}, {c + 1} are mutually non-adjacent (three components)")
    else:
        print("unique")
    return 0


def cmd_verify(args) -> int:
    model = _model(args)
    moves = _load(args.moves, io.moves_from_json)
    for z in moves:
        model.check_table(z.pos)
        model.check_table(z.neg)
        if not z.is_balanced(model):
            print(f"FAIL: {z!r} changes the facet marginals")
            return 1
    verdict = is_markov_basis(model, moves, args.degree_cap)
    if verdict:
        print(f"PASS: {len(moves)} moves connect every fiber up to degree {args.degree_cap}")
        return 0
    d, comps = verdict.witness
    print(f"FAIL: a degree-{d} fiber splits into {len(comps)} components")
    for comp in comps:
        print("  " + " ".join(repr(t) for t in comp))
    return 1


def cmd_exact_test(args) -> int:
    model = _model(args)
    t = _load(args.table, io.table_from_json, model)
    moves = _load(args.basis, io.moves_from_json)
    cfg = ChainConfig(args.steps, args.burnin, args.thin, args.seed)
    res = exact_test(t, model, moves, cfg)
    print(json.dumps(res.as_dict(), sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mbk",
        description="Markov bases for decomposable log-linear models.",
        epilog=io.SCHEMAS,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_, description=help_, epilog=io.SCHEMAS,
                            formatter_class=argparse.RawDescriptionHelpFormatter)
        sp.add_argument("--model", required=True, help="model JSON file")
        sp.set_defaults(func=func)
        return sp

    sp = add("analyze", cmd_analyze, "independence graph, cliques, clique tree and elimination order")
    sp.add_argument("--dot", metavar="FILE", help="write the clique tree in DOT format")
    sp.add_argument("--tree-cap", type=int, default=10_000, help="cap on enumerated clique trees")

    sp = add("fibers", cmd_fibers, "degree-two fibers with two or more members")
    grp = sp.add_mutually_exclusive_group()
    grp.add_argument("--all", action="store_true", help="every fiber (default)")
    grp.add_argument("--representative", action="store_true", help="standardized representatives only")
    sp.add_argument("--b", metavar="FILE", help="margins or table file: show that one fiber")
    sp.add_argument("--members", action="store_true", help="list the members of every fiber")

    sp = add("min-basis", cmd_min_basis, "minimal Markov basis (spanning tree per fiber)")
    sp.add_argument("--policy", default="star", help="star, path, random or random:SEED")
    sp.add_argument("--seed", type=int, default=0, help="seed for --policy random")
    sp.add_argument("--out", help="moves JSON output")

    sp = add("dobra", cmd_dobra, "clique-tree Markov basis")
    sp.add_argument("--tree", help="clique tree JSON (default: canonical tree)")
    sp.add_argument("--out", help="moves JSON output")

    sp = add("invariant-basis", cmd_invariant_basis, "minimal basis invariant under relabeling of levels")
    sp.add_argument("--flavor", choices=FLAVORS, default="staircase")
    sp.add_argument("--representatives", action="store_true", help="write only one move per orbit")
    sp.add_argument("--out", help="moves JSON output (with orbit index)")

    sp = add("groebner", cmd_groebner, "reduced Groebner basis under the boundary-clique order")
    sp.add_argument("--verify-cap", type=int, default=0, help="check normal forms up to this degree")
    sp.add_argument("--out", help="moves JSON output")

    add("check-unique", cmd_check_unique, "is the minimal Markov basis unique?")

    sp = add("verify", cmd_verify, "check that a move set connects every fiber")
    sp.add_argument("--moves", required=True, help="moves JSON file")
    sp.add_argument("--degree-cap", type=int, default=2)

    sp = add("exact-test", cmd_exact_test, "Monte Carlo exact goodness-of-fit test")
    sp.add_argument("--table", required=True, help="table JSON file")
    sp.add_argument("--basis", required=True, help="moves JSON file")
    sp.add_argument("--steps", type=int, default=10_000)
    sp.add_argument("--burnin", type=int, default=1_000)
    sp.add_argument("--thin", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"mbk: error: {exc}", file=sys.stderr)
        print(io.SCHEMAS, file=sys.stderr)
        return 2
    except MarkovBasisError as exc:
        print(f"mbk: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"mbk: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
