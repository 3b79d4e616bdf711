"""Regularity-model-based multiobjective EDA (RM-MEDA).

Each generation partitions the population with local PCA, builds an
(M-1)-dimensional piecewise-linear model of the Pareto set with Gaussian
noise, samples offspring from it and keeps the best ``N`` by
nondominated rank and crowding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from trdmoea.moea.core import Archive, fast_nondominated_sort, select_by_rank_and_crowding
from trdmoea.problems import DynamicProblem


@dataclass(frozen=True)
class RmMedaParams:
    clusters: int = 5
    extension: float = 0.25
    lpca_iterations: int = 50


def local_pca(X: np.ndarray, clusters: int, latent_dim: int, iterations: int, rng):
    """Partition rows of ``X`` by distance to each cluster's principal affine subspace."""
    N = len(X)
    K = min(clusters, N)
    labels = rng.permutation(np.arange(N) % K)
    for _ in range(iterations):
        residuals = np.empty((N, K))
        for k in range(K):
            members = X[labels == k]
            if len(members) == 0:
                members = X[rng.integers(N)][None, :]
            mean = members.mean(axis=0)
            vecs = _principal_axes(members - mean, latent_dim)
            D = X - mean
            proj = D @ vecs
            residuals[:, k] = np.sum(D**2, axis=1) - np.sum(proj**2, axis=1)
        new = np.argmin(residuals, axis=1)
        if np.array_equal(new, labels):
            break
        labels = new
    return labels


def _principal_axes(D: np.ndarray, count: int) -> np.ndarray:
    cov = D.T @ D / max(len(D) - 1, 1)
    vals, vecs = np.linalg.eigh(cov)
    return vecs[:, ::-1][:, :count]


def sample_offspring(X, labels, count, latent_dim, extension, lower, upper, rng):
    models = []
    for k in np.unique(labels):
        members = X[labels == k]
        mean = members.mean(axis=0)
        D = members - mean
        cov = D.T @ D / max(len(D) - 1, 1)
        vals, vecs = np.linalg.eigh(cov)
        vals, vecs = vals[::-1], vecs[:, ::-1]
        axes = vecs[:, :latent_dim]
        proj = D @ axes
        lo, hi = proj.min(axis=0), proj.max(axis=0)
        pad = extension * (hi - lo)
        lo, hi = lo - pad, hi + pad
        rest = vals[latent_dim:]
        sigma = float(np.mean(np.maximum(rest, 0.0))) if rest.size else 0.0
        volume = float(np.prod(np.maximum(hi - lo, 1e-12)))
        models.append((mean, axes, lo, hi, sigma, volume))

    weights = np.array([m[5] for m in models])
    choice = rng.choice(len(models), size=count, p=weights / weights.sum())
    children = np.empty((count, X.shape[1]))
    for j, k in enumerate(choice):
        mean, axes, lo, hi, sigma, _ = models[k]
        s = lo + rng.random(len(lo)) * (hi - lo)
        children[j] = mean + axes @ s + rng.normal(0.0, np.sqrt(sigma), X.shape[1])
    return np.clip(children, lower, upper)


def rmmeda_run(
    problem: DynamicProblem,
    t: float,
    X0,
    generations: int,
    rng: np.random.Generator,
    params: RmMedaParams | None = None,
) -> Archive:
    params = params or RmMedaParams()
    X = np.array(X0, dtype=float, copy=True)
    F = problem.evaluate(X, t)
    N = len(X)
    latent_dim = max(problem.n_obj - 1, 1)
    for _ in range(generations):
        labels = local_pca(X, params.clusters, latent_dim, params.lpca_iterations, rng)
        children = sample_offspring(
            X, labels, N, latent_dim, params.extension, problem.lower, problem.upper, rng
        )
        Fc = problem.evaluate(children, t)
        X_all = np.vstack([X, children])
        F_all = np.vstack([F, Fc])
        keep = select_by_rank_and_crowding(F_all, N)
        X, F = X_all[keep], F_all[keep]
    first = fast_nondominated_sort(F)[0]
    return Archive(X=X[first], F=F[first], t=t)
