"""Multiobjective particle swarm optimisation with an adaptive-grid external archive."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from trdmoea.moea.core import Archive, nondominated_indices
from trdmoea.problems import DynamicProblem


@dataclass(frozen=True)
class MopsoParams:
    inertia: float = 0.4
    c1: float = 1.0
    c2: float = 1.0
    divisions: int = 30
    mutation_rate: float = 0.5
    archive_size: int | None = None  # None means the swarm size


def grid_cells(F: np.ndarray, divisions: int) -> np.ndarray:
    """Hypercube index of each archive member on a grid spanning the archive."""
    lo = F.min(axis=0)
    hi = F.max(axis=0)
    span = hi - lo
    pad = np.where(span > 0, 0.05 * span, 0.5)
    lo, hi = lo - pad, hi + pad
    coords = np.floor((F - lo) / (hi - lo) * divisions).astype(int)
    coords = np.clip(coords, 0, divisions - 1)
    # flatten to one integer key per cell
    key = np.zeros(len(F), dtype=np.int64)
    for m in range(F.shape[1]):
        key = key * divisions + coords[:, m]
    return key


def select_leaders(F_archive: np.ndarray, count: int, divisions: int, rng) -> np.ndarray:
    """Roulette over occupied hypercubes with fitness 10 / occupancy, then a random member."""
    keys = grid_cells(F_archive, divisions)
    cells, inverse, occupancy = np.unique(keys, return_inverse=True, return_counts=True)
    fitness = 10.0 / occupancy
    picked = rng.choice(len(cells), size=count, p=fitness / fitness.sum())
    leaders = np.empty(count, dtype=int)
    for j, c in enumerate(picked):
        members = np.flatnonzero(inverse == c)
        leaders[j] = members[rng.integers(len(members))]
    return leaders


def truncate_archive(F: np.ndarray, capacity: int, divisions: int, rng) -> np.ndarray:
    """Indices kept after removing members from the most crowded hypercubes."""
    keep = np.arange(len(F))
    while len(keep) > capacity:
        keys = grid_cells(F[keep], divisions)
        cells, inverse, occupancy = np.unique(keys, return_inverse=True, return_counts=True)
        crowded = np.flatnonzero(inverse == np.argmax(occupancy))
        keep = np.delete(keep, crowded[rng.integers(len(crowded))])
    return keep


def update_velocity_position(X, V, pbest, leaders, lower, upper, inertia, c1, c2, rng):
    """One PSO move; particles leaving the box are clamped and their velocity reversed."""
    r1 = rng.random(X.shape)
    r2 = rng.random(X.shape)
    V = inertia * V + c1 * r1 * (pbest - X) + c2 * r2 * (leaders - X)
    X = X + V
    out = (X < lower) | (X > upper)
    X = np.clip(X, lower, upper)
    V = np.where(out, -V, V)
    return X, V


def mutate(X, lower, upper, generation, generations, rate, rng):
    """Coello-style mutation whose probability and range decay over the run."""
    X = X.copy()
    if generations <= 0:
        return X
    p = (1.0 - generation / generations) ** (5.0 / rate)
    hit = np.flatnonzero(rng.random(len(X)) < p)
    if hit.size == 0:
        return X
    dims = rng.integers(X.shape[1], size=hit.size)
    half = (upper[dims] - lower[dims]) * p / 2.0
    lo = np.maximum(X[hit, dims] - half, lower[dims])
    hi = np.minimum(X[hit, dims] + half, upper[dims])
    X[hit, dims] = lo + rng.random(hit.size) * (hi - lo)
    return X


def _merge_archive(AX, AF, X, F, capacity, divisions, rng):
    allX = np.vstack([AX, X])
    allF = np.vstack([AF, F])
    nd = nondominated_indices(allF)
    # duplicates of the same objective vector add nothing to the front
    _, first = np.unique(allF[nd], axis=0, return_index=True)
    nd = nd[np.sort(first)]
    allX, allF = allX[nd], allF[nd]
    if len(allF) > capacity:
        keep = truncate_archive(allF, capacity, divisions, rng)
        allX, allF = allX[keep], allF[keep]
    return allX, allF


def mopso_run(
    problem: DynamicProblem,
    t: float,
    X0,
    generations: int,
    rng: np.random.Generator,
    params: MopsoParams | None = None,
) -> Archive:
    """Fly the swarm ``X0`` for ``generations`` iterations on ``F(., t)``."""
    params = params or MopsoParams()
    lower, upper = problem.lower, problem.upper
    X = np.array(X0, dtype=float, copy=True)
    N = len(X)
    capacity = params.archive_size or N
    V = np.zeros_like(X)
    F = problem.evaluate(X, t)
    pbest, pbest_F = X.copy(), F.copy()
    AX, AF = _merge_archive(
        np.empty((0, X.shape[1])), np.empty((0, F.shape[1])), X, F,
        capacity, params.divisions, rng,
    )

    for gen in range(generations):
        leaders = AX[select_leaders(AF, N, params.divisions, rng)]
        X, V = update_velocity_position(
            X, V, pbest, leaders, lower, upper,
            params.inertia, params.c1, params.c2, rng,
        )
        X = mutate(X, lower, upper, gen, generations, params.mutation_rate, rng)
        F = problem.evaluate(X, t)
        AX, AF = _merge_archive(AX, AF, X, F, capacity, params.divisions, rng)

        new_wins = np.all(F <= pbest_F, axis=1) & np.any(F < pbest_F, axis=1)
        old_wins = np.all(pbest_F <= F, axis=1) & np.any(pbest_F < F, axis=1)
        coin = rng.random(N) < 0.5
        replace = new_wins | (~old_wins & coin)
        pbest[replace] = X[replace]
        pbest_F[replace] = F[replace]

    return Archive(X=AX, F=AF, t=t)

