"""NSGA-II with SBX crossover and polynomial mutation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from trdmoea.moea.core import (
    Archive,
    crowding_distance,
    fast_nondominated_sort,
    ranks_from_fronts,
    select_by_rank_and_crowding,
)
from trdmoea.problems import DynamicProblem


@dataclass(frozen=True)
class Nsga2Params:
    eta_c: float = 15.0
    p_c: float = 0.9
    eta_m: float = 20.0
    p_m: float | None = None  # None means 1 / n_var


def sbx_crossover(P1, P2, lower, upper, eta, p_c, rng):
    """Bounded simulated binary crossover applied row-wise to parent pairs."""
    P1 = np.asarray(P1, dtype=float)
    P2 = np.asarray(P2, dtype=float)
    C1, C2 = P1.copy(), P2.copy()
    n_pairs, n = P1.shape
    do_pair = rng.random(n_pairs) < p_c
    do_var = (rng.random((n_pairs, n)) < 0.5) & do_pair[:, None]
    do_var &= np.abs(P1 - P2) > 1e-14
    u = rng.random((n_pairs, n))
    swap = rng.random((n_pairs, n)) < 0.5

    y1 = np.minimum(P1, P2)
    y2 = np.maximum(P1, P2)
    diff = np.where(do_var, y2 - y1, 1.0)
    lo = np.broadcast_to(lower, P1.shape)
    hi = np.broadcast_to(upper, P1.shape)

    def betaq(beta):
        alpha = 2.0 - beta ** -(eta + 1.0)
        return np.where(
            u <= 1.0 / alpha,
            (u * alpha) ** (1.0 / (eta + 1.0)),
            (1.0 / np.maximum(2.0 - u * alpha, 1e-300)) ** (1.0 / (eta + 1.0)),
        )

    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        c1 = 0.5 * (y1 + y2 - betaq(1.0 + 2.0 * (y1 - lo) / diff) * (y2 - y1))
        c2 = 0.5 * (y1 + y2 + betaq(1.0 + 2.0 * (hi - y2) / diff) * (y2 - y1))
    c1 = np.clip(c1, lo, hi)
    c2 = np.clip(c2, lo, hi)
    a = np.where(swap, c2, c1)
    b = np.where(swap, c1, c2)
    C1[do_var] = a[do_var]
    C2[do_var] = b[do_var]
    return C1, C2


def polynomial_mutation(X, lower, upper, eta, p_m, rng):
    """Bounded polynomial mutation; each variable mutates with probability ``p_m``."""
    X = np.array(X, dtype=float, copy=True)
    span = upper - lower
    mask = rng.random(X.shape) < p_m
    u = rng.random(X.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        d1 = (X - lower) / span
        d2 = (upper - X) / span
    power = 1.0 / (eta + 1.0)
    low_branch = u < 0.5
    val_lo = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1) ** (eta + 1.0)
    val_hi = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2) ** (eta + 1.0)
    deltaq = np.where(low_branch, val_lo**power - 1.0, 1.0 - val_hi**power)
    X[mask] = (X + deltaq * span)[mask]
    return np.clip(X, lower, upper)


def binary_tournament(rank, crowd, count, rng):
    a = rng.integers(len(rank), size=count)
    b = rng.integers(len(rank), size=count)
    a_wins = (rank[a] < rank[b]) | ((rank[a] == rank[b]) & (crowd[a] >= crowd[b]))
    return np.where(a_wins, a, b)


def _rank_and_crowding(F):
    fronts = fast_nondominated_sort(F)
    rank = ranks_from_fronts(fronts, len(F))
    crowd = np.empty(len(F))
    for front in fronts:
        crowd[front] = crowding_distance(F[front])
    return rank, crowd


def nsga2_run(
    problem: DynamicProblem,
    t: float,
    X0,
    generations: int,
    rng: np.random.Generator,
    params: Nsga2Params | None = None,
) -> Archive:
    """Evolve ``X0`` for ``generations`` generations on ``F(., t)``.

    Evaluates the initial population once and ``len(X0)`` offspring per
    generation; returns the first front of the final population.
    """
    params = params or Nsga2Params()
    lower, upper = problem.lower, problem.upper
    X = np.array(X0, dtype=float, copy=True)
    F = problem.evaluate(X, t)
    N, n = X.shape
    p_m = params.p_m if params.p_m is not None else 1.0 / n

    for _ in range(generations):
        rank, crowd = _rank_and_crowding(F)
        n_pairs = (N + 1) // 2
        parents = binary_tournament(rank, crowd, 2 * n_pairs, rng)
        C1, C2 = sbx_crossover(
            X[parents[:n_pairs]], X[parents[n_pairs:]], lower, upper,
            params.eta_c, params.p_c, rng,
        )
        children = np.vstack([C1, C2])[:N]
        children = polynomial_mutation(children, lower, upper, params.eta_m, p_m, rng)
        Fc = problem.evaluate(children, t)
        X_all = np.vstack([X, children])
        F_all = np.vstack([F, Fc])
        keep = select_by_rank_and_crowding(F_all, N)
        X, F = X_all[keep], F_all[keep]

    first = fast_nondominated_sort(F)[0]
    return Archive(X=X[first], F=F[first], t=t)
