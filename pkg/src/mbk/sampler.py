"""Metropolis-Hastings over a fiber and the exact goodness-of-fit test.

The target is the conditional distribution of a table given its facet
marginals under the model, proportional to ``1 / prod n(i)!``.  Proposals
draw a move and a sign uniformly; a proposal that would drive a count
negative leaves the chain where it is.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lgamma
from typing import Iterator, Sequence

import numpy as np

from .chordal import CliqueTree, clique_tree, independence_graph, is_decomposable
from .core import ModelSpec, Move, Table
from .errors import EmptyBasis, ModelError, NotDecomposable

N_BATCHES = 20


@dataclass(frozen=True)
class ChainConfig:
    steps: int = 10_000
    burn_in: int = 1_000
    thin: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.burn_in < 0 or self.steps <= self.burn_in:
            raise ValueError("need steps > burn_in >= 0")
        if self.thin < 1:
            raise ValueError("thin must be at least 1")


def _log_weight_ratio(t: Table, add: Table, sub: Table) -> float:
    """``log(prod t! / prod t'!)`` where ``t' = t - sub + add``; only touched cells count."""
    out = 0.0
    for c, k in sub.items():
        n = t[c]
        out += lgamma(n + 1) - lgamma(n - k + 1)
    for c, k in add.items():
        n = t[c]
        out += lgamma(n + 1) - lgamma(n + k + 1)
    return out


def mh_step(t: Table, moves: Sequence[Move], rng: np.random.Generator) -> Table:
    """One lazy Metropolis-Hastings step."""
    if not moves:
        raise EmptyBasis("cannot run a chain without moves")
    z = moves[int(rng.integers(len(moves)))]
    add, sub = (z.pos, z.neg) if rng.integers(2) else (z.neg, z.pos)
    if not sub.divides(t):
        return t
    log_ratio = _log_weight_ratio(t, add, sub)
    if log_ratio >= 0 or rng.random() < np.exp(log_ratio):
        return t - sub + add
    return t


def run_chain(start: Table, moves: Sequence[Move], cfg: ChainConfig) -> Iterator[Table]:
    """Yield the states kept after burn-in and thinning."""
    moves = list(moves)
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    t = start
    for step in range(cfg.steps):
        t = mh_step(t, moves, rng)
        if step >= cfg.burn_in and (step - cfg.burn_in) % cfg.thin == 0:
            yield t


def chain_seeds(seed: int, n: int) -> list[int]:
    """Independent child seeds for parallel chains."""
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(n)]


# ---------------------------------------------------------------------------
# fitting


@dataclass(frozen=True)
class FitResult:
    fitted: np.ndarray
    chi2: float


def to_dense(t: Table, model: ModelSpec) -> np.ndarray:
    arr = np.zeros(model.levels, dtype=np.int64)
    for c, n in t.items():
        arr[c] = n
    return arr


def _margin(arr: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    drop = tuple(v for v in range(arr.ndim) if v not in keep)
    return arr.sum(axis=drop, keepdims=True)


def fitted_means(t: Table, model: ModelSpec, tree: CliqueTree | None = None) -> np.ndarray:
    """Closed-form maximum likelihood estimate for a decomposable model.

    Product of clique marginals over the product of separator marginals;
    an empty separator contributes the sample size.
    """
    if not is_decomposable(model):
        raise NotDecomposable(f"generating class {model.facets} is not decomposable")
    if tree is None:
        tree = clique_tree(independence_graph(model))
    arr = to_dense(t, model).astype(float)
    num = np.ones(model.levels)
    for c in tree.cliques:
        num = num * _margin(arr, c)
    den = np.ones(model.levels)
    for s in tree.separators:
        den = den * _margin(arr, s)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0, num / np.where(den > 0, den, 1), 0.0)
    return out


def chi_square(arr: np.ndarray, fitted: np.ndarray) -> float:
    """Pearson statistic over cells with positive fitted mean."""
    mask = fitted > 0
    return float((((arr - fitted) ** 2)[mask] / fitted[mask]).sum())


def fit_decomposable(t: Table, model: ModelSpec, tree: CliqueTree | None = None) -> FitResult:
    fitted = fitted_means(t, model, tree)
    return FitResult(fitted, chi_square(to_dense(t, model), fitted))


# ---------------------------------------------------------------------------
# exact test


@dataclass(frozen=True)
class ExactTestResult:
    p_value: float
    se: float
    steps: int
    samples: int
    chi2_observed: float

    def as_dict(self) -> dict:
        return {
            "p_value": self.p_value,
            "se": self.se,
            "steps": self.steps,
            "samples": self.samples,
            "chi2_observed": self.chi2_observed,
        }


def batch_means_se(x: np.ndarray, n_batches: int = N_BATCHES) -> float:
    """Standard error of the mean of a correlated series via batch means."""
    n = len(x) // n_batches * n_batches
    if n < n_batches or n_batches < 2:
        return 0.0
    means = x[:n].reshape(n_batches, -1).mean(axis=1)
    return float(means.std(ddof=1) / np.sqrt(n_batches))


def exact_test(t: Table, model: ModelSpec, moves: Sequence[Move], cfg: ChainConfig,
               tree: CliqueTree | None = None) -> ExactTestResult:
    """Monte Carlo p-value: share of sampled tables at least as extreme as ``t``."""
    model.check_table(t)
    fitted = fitted_means(t, model, tree)
    observed = chi_square(to_dense(t, model), fitted)
    moves = list(moves)
    if not moves:
        raise EmptyBasis("cannot run a chain without moves")
    tol = 1e-9 * max(1.0, observed)
    cache: dict[Table, float] = {}
    hits = []
    for s in run_chain(t, moves, cfg):
        stat = cache.get(s)
        if stat is None:
            stat = cache[s] = chi_square(to_dense(s, model), fitted)
        hits.append(stat >= observed - tol)
    x = np.asarray(hits, dtype=float)
    return ExactTestResult(float(x.mean()), batch_means_se(x), cfg.steps, len(x), observed)


def exact_p_value_bruteforce(t: Table, model: ModelSpec, members: Sequence[Table],
                             tree: CliqueTree | None = None) -> float:
    """Exact p-value by summing ``1 / prod n!`` weights over an enumerated fiber."""
    if t not in set(members):
        raise ModelError("observed table is not in the given fiber")
    fitted = fitted_means(t, model, tree)
    observed = chi_square(to_dense(t, model), fitted)
    tol = 1e-9 * max(1.0, observed)
    logw = np.array([-sum(lgamma(n + 1) for _, n in s.items()) for s in members])
    w = np.exp(logw - logw.max())
    extreme = np.array([chi_square(to_dense(s, model), fitted) >= observed - tol for s in members])
    return float(w[extreme].sum() / w.sum())


def occupancy(states: Iterator[Table], members: Sequence[Table]) -> np.ndarray:
    """Empirical visit frequencies of ``members`` along a chain."""
    index = {s: i for i, s in enumerate(members)}
    counts = np.zeros(len(members))
    for s in states:
        counts[index[s]] += 1
    return counts / max(counts.sum(), 1)
