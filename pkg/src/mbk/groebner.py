"""Reduced Gröbner bases for decomposable models, checked by reduction.

The basis is the star on every degree-two fiber centred at its lowest
member under the boundary-clique revlex order.  Instead of Buchberger
completion, Gröbner-ness is verified through normal forms: a binomial set
is a Gröbner basis when every table reduces to the minimum of its fiber.
"""

from __future__ import annotations

from typing import Iterable

from .bases import MarkovBasis, minimal_basis
from .chordal import is_decomposable
from .core import ModelSpec, Move, Table, Verdict
from .errors import NotDecomposable
from .oracle import iter_fibers
from .order import TermOrder

MAX_REDUCTION_STEPS = 100_000


def groebner_basis(model: ModelSpec, order: TermOrder | None = None, cap: int | None = None) -> MarkovBasis:
    """Moves from every non-minimal member of a degree-two fiber to its minimum."""
    if not is_decomposable(model):
        raise NotDecomposable(f"generating class {model.facets} is not decomposable")
    order = order or TermOrder(model)
    basis = minimal_basis(model, "star", order, cap)
    return MarkovBasis(basis.moves, "groebner", basis.keys)


def _oriented(moves: Iterable[Move], order: TermOrder) -> list[tuple[Table, Table]]:
    return [order.orient(z) for z in moves]


def reduce_to_normal_form(t: Table, moves: Iterable[Move], order: TermOrder,
                          max_steps: int = MAX_REDUCTION_STEPS) -> Table:
    """Replace a divisible leading part by its trailing part until none divides."""
    rules = _oriented(moves, order)
    for _ in range(max_steps):
        for lead, trail in rules:
            if lead.divides(t):
                t = t - lead + trail
                break
        else:
            return t
    raise RuntimeError(f"reduction did not terminate within {max_steps} steps")


def is_groebner_empirically(moves: Iterable[Move], model: ModelSpec, order: TermOrder,
                            degree_cap: int = 3) -> Verdict:
    """Every table of degree ``<= degree_cap`` reduces to its fiber minimum.

    Witness on failure: ``(table, normal_form, fiber_minimum)``.
    """
    moves = list(moves)
    for d in range(2, degree_cap + 1):
        for members in iter_fibers(model, d):
            if len(members) < 2:
                continue
            low = order.minimum(members)
            for t in members:
                nf = reduce_to_normal_form(t, moves, order)
                if nf != low:
                    return Verdict(False, (t, nf, low))
    return Verdict(True, None)


def is_reduced(moves: Iterable[Move], order: TermOrder) -> Verdict:
    """No leading part divides another move's leading or trailing part.

    Witness on failure: the offending ``(divisor_move, move)`` pair.
    """
    moves = list(moves)
    rules = _oriented(moves, order)
    for i, (lead_i, _) in enumerate(rules):
        for j, (lead_j, trail_j) in enumerate(rules):
            if i != j and (lead_i.divides(lead_j) or lead_i.divides(trail_j)):
                return Verdict(False, (moves[i], moves[j]))
    return Verdict(True, None)
