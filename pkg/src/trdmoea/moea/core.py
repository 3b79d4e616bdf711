"""Pareto dominance, nondominated sorting and crowding distance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from trdmoea.errors import ArgumentError


@dataclass
class Population:
    """Decision vectors ``X`` (N, n) with objective vectors ``F`` (N, M) at time ``t``."""

    X: np.ndarray
    F: np.ndarray
    t: float

    def __len__(self):
        return len(self.X)


@dataclass
class Archive:
    """Mutually nondominated members found for one environment."""

    X: np.ndarray
    F: np.ndarray
    t: float

    def __len__(self):
        return len(self.X)


def dominates(a, b) -> bool:
    """True iff objective vector ``a`` Pareto-dominates ``b`` (minimisation)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ArgumentError(f"objective counts differ: {a.shape} vs {b.shape}")
    return bool(np.all(a <= b) and np.any(a < b))


def dominance_matrix(F: np.ndarray) -> np.ndarray:
    """``D[i, j]`` is True iff row i dominates row j."""
    F = np.asarray(F, dtype=float)
    le = np.all(F[:, None, :] <= F[None, :, :], axis=2)
    lt = np.any(F[:, None, :] < F[None, :, :], axis=2)
    return le & lt


def fast_nondominated_sort(F) -> list[np.ndarray]:
    """Partition row indices of ``F`` into fronts, best first."""
    F = np.atleast_2d(np.asarray(F, dtype=float))
    if len(F) == 0:
        return []
    D = dominance_matrix(F)
    counts = D.sum(axis=0)  # how many rows dominate each row
    fronts = []
    current = np.flatnonzero(counts == 0)
    while current.size:
        fronts.append(current)
        counts = counts - D[current].sum(axis=0)
        counts[current] = -1
        current = np.flatnonzero(counts == 0)
    return fronts


def ranks_from_fronts(fronts: list[np.ndarray], size: int) -> np.ndarray:
    rank = np.empty(size, dtype=int)
    for r, idx in enumerate(fronts):
        rank[idx] = r
    return rank


def nondominated_indices(F) -> np.ndarray:
    F = np.atleast_2d(np.asarray(F, dtype=float))
    if len(F) == 0:
        return np.empty(0, dtype=int)
    return np.flatnonzero(~dominance_matrix(F).any(axis=0))


def crowding_distance(F) -> np.ndarray:
    """Crowding distance of each member of one front.

    Boundary members of every objective get ``inf``; an objective with zero
    range adds nothing to interior members.
    """
    F = np.atleast_2d(np.asarray(F, dtype=float))
    N, M = F.shape
    if N == 0:
        raise ArgumentError("crowding distance of an empty front")
    dist = np.zeros(N)
    if N <= 2:
        dist[:] = np.inf
        return dist
    for m in range(M):
        order = np.argsort(F[:, m], kind="stable")
        f = F[order, m]
        dist[order[0]] = dist[order[-1]] = np.inf
        span = f[-1] - f[0]
        if span > 0:
            dist[order[1:-1]] += (f[2:] - f[:-2]) / span
    return dist


def select_by_rank_and_crowding(F: np.ndarray, size: int) -> np.ndarray:
    """Indices of the ``size`` survivors of NSGA-II environmental selection."""
    chosen = []
    for front in fast_nondominated_sort(F):
        if len(chosen) + len(front) <= size:
            chosen.extend(front.tolist())
            if len(chosen) == size:
                break
            continue
        cd = crowding_distance(F[front])
        order = np.argsort(-cd, kind="stable")
        chosen.extend(front[order[: size - len(chosen)]].tolist())
        break
    return np.asarray(chosen, dtype=int)
