"""Markov bases, minimal invariant bases and reduced Gröbner bases for
decomposable log-linear models of contingency tables."""

from .bases import (
    MarkovBasis,
    OrbitAnnotatedBasis,
    algorithm1,
    dobra_basis,
    dobra_is_minimal,
    dobra_is_minimal_invariant,
    gf2_default_basis,
    invariant_basis,
    is_markov_basis,
    minimal_basis,
    minimal_basis_from_invariant,
)
from .chordal import (
    CliqueTree,
    Graph,
    boundary_cliques,
    clique_tree,
    elimination_variable_order,
    enumerate_clique_trees,
    independence_graph,
    is_chordal,
    is_decomposable,
    maximal_cliques,
)
from .core import (
    DegreeTwoTable,
    MarginalVector,
    ModelSpec,
    Move,
    Table,
    Verdict,
    apply_move,
    compute_b,
    is_consistent,
    marginalize,
    move_from_tables,
)
from .errors import *  # noqa: F401,F403
from .fiber2 import (
    Fiber,
    FiberKey,
    classify_variables,
    component_patterns,
    enumerate_all_degree2_fibers,
    enumerate_fiber,
    enumerate_representative_fibers,
    fiber_key,
    fiber_size,
    minimal_bases_nonunique,
)
from .groebner import groebner_basis, is_groebner_empirically, is_reduced, reduce_to_normal_form
from .order import TermOrder, compare, fiber_minimum
from .sampler import ChainConfig, FitResult, exact_test, fit_decomposable, mh_step, run_chain

__version__ = "0.1.0"
