"""Transfer-learning initial population generator.

Given the front found for the previous environment, fit TCA on objective
samples of the old and new environments, map every front member into the
latent space, then search the new environment's decision space for points
whose latent image lands on those targets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from trdmoea.errors import ArgumentError
from trdmoea.problems import DynamicProblem, sample_decision_space
from trdmoea.tca import KernelSpec, TcaModel, tca_fit


@dataclass(frozen=True)
class IpgConfig:
    n_s: int = 100
    n_t_samples: int = 100
    d: int = 20
    mu: float = 0.5
    inner_budget: int = 500
    target_pop_size: int = 200
    max_pof: int = 500
    n_probes: int = 8
    init_step: float = 0.25  # fraction of each variable's range
    min_step: float = 1e-6

    def __post_init__(self):
        if self.n_s < 2 or self.n_t_samples < 2:
            raise ArgumentError("n_s and n_t_samples must be at least 2")
        if not 1 <= self.d <= self.n_s + self.n_t_samples:
            raise ArgumentError("d must lie in [1, n_s + n_t_samples]")
        if self.inner_budget < 1:
            raise ArgumentError("inner_budget must be at least 1")
        if self.target_pop_size < 1 or self.max_pof < 1 or self.n_probes < 1:
            raise ArgumentError("target_pop_size, max_pof and n_probes must be positive")
        if not self.mu > 0:
            raise ArgumentError("mu must be positive")


@dataclass
class SearchResult:
    X: np.ndarray  # (P, n) best points
    g: np.ndarray  # (P,) their objective values
    evaluations: np.ndarray  # (P,) evaluations spent per target
    history: list[np.ndarray] = field(default_factory=list)  # best g after each sweep


@dataclass
class IpgResult:
    X: np.ndarray  # (N, n) initial population
    n_transferred: int
    g: np.ndarray  # final inner objective of the transferred members, population order
    model: TcaModel
    targets: np.ndarray
    source_bank: np.ndarray
    target_bank: np.ndarray

    def to_debug_json(self) -> str:
        return json.dumps(
            {
                "source_bank": self.source_bank.tolist(),
                "target_bank": self.target_bank.tolist(),
                "kernel": self.model.kernel.to_dict(),
                "W": self.model.W.tolist(),
                "eigenvalues": self.model.eigenvalues.tolist(),
                "latent_targets": self.targets.tolist(),
                "final_g": self.g.tolist(),
                "n_transferred": self.n_transferred,
            }
        )


def build_latent_targets(model: TcaModel, pof_prev) -> np.ndarray:
    P = np.asarray(pof_prev, dtype=float)
    if P.size == 0:
        return np.empty((0, model.d))
    return model.transform(P)


def pattern_search(objective, lower, upper, X0, f0, budget, init_step=0.25, min_step=1e-6):
    """Bounded Hooke-Jeeves search run in lockstep over independent starts.

    Args:
        objective: callable ``(X, idx) -> g`` where row ``j`` of ``X`` belongs to
            start ``idx[j]``; rows must be evaluated independently.
        lower, upper: box bounds.
        X0, f0: start points (P, n) and their objective values (P,).
        budget: per-start evaluation allowance (int or (P,) array).
        init_step, min_step: step length as a fraction of each variable's range.

    Returns:
        SearchResult with the best point per start. Only strict improvements
        are accepted, so each start's best value never increases.
    """
    X = np.array(X0, dtype=float, copy=True)
    fX = np.array(f0, dtype=float, copy=True)
    P, n = X.shape
    span = np.asarray(upper, dtype=float) - np.asarray(lower, dtype=float)
    budget = np.broadcast_to(np.asarray(budget, dtype=int), (P,)).copy()
    used = np.zeros(P, dtype=int)
    step = np.full(P, float(init_step))
    history = [fX.copy()]

    def try_moves(cand, idx):
        # cand rows equal to the current point are skipped and cost nothing
        moved = np.any(cand != X[idx], axis=1)
        idx, cand = idx[moved], cand[moved]
        if idx.size == 0:
            return idx
        g = objective(cand, idx)
        used[idx] += 1
        better = g < fX[idx]
        X[idx[better]] = cand[better]
        fX[idx[better]] = g[better]
        return idx[better]

    active = (step >= min_step) & (used < budget)
    while active.any():
        base = X.copy()
        for i in range(n):
            pending = np.flatnonzero(active & (used < budget))
            for sign in (1.0, -1.0):
                if pending.size == 0:
                    break
                cand = X[pending].copy()
                cand[:, i] = np.clip(
                    cand[:, i] + sign * step[pending] * span[i], lower[i], upper[i]
                )
                accepted = try_moves(cand, pending)
                pending = np.setdiff1d(pending, accepted)
                pending = pending[used[pending] < budget[pending]]
        improved = active & np.any(X != base, axis=1)
        jump = np.flatnonzero(improved & (used < budget))
        if jump.size:
            cand = np.clip(2.0 * X[jump] - base[jump], lower, upper)
            try_moves(cand, jump)
        step[active & ~improved] *= 0.5
        history.append(fX.copy())
        active = (step >= min_step) & (used < budget)
    return SearchResult(X=X, g=fX, evaluations=used, history=history)


def _latent_objective(problem: DynamicProblem, t: float, model: TcaModel, targets: np.ndarray):
    def objective(X, idx):
        Z = model.transform(problem.evaluate(X, t))
        return np.sum((Z - targets[idx]) ** 2, axis=1)

    return objective


def _search_targets(problem, t, model, targets, budget, rngs, n_probes, x0=None, **kw):
    P = len(targets)
    objective = _latent_objective(problem, t, model, targets)
    if x0 is not None:
        starts = np.atleast_2d(np.asarray(x0, dtype=float))
        f0 = objective(starts, np.arange(P))
        spent = np.ones(P, dtype=int)
    else:
        probes = min(n_probes, budget)
        cand = np.stack([sample_decision_space(problem, probes, r) for r in rngs])  # (P, probes, n)
        flat = cand.reshape(P * probes, -1)
        g = objective(flat, np.repeat(np.arange(P), probes)).reshape(P, probes)
        best = np.argmin(g, axis=1)
        starts = cand[np.arange(P), best]
        f0 = g[np.arange(P), best]
        spent = np.full(P, probes)
    res = pattern_search(
        objective, problem.lower, problem.upper, starts, f0, budget - spent, **kw
    )
    res.evaluations = res.evaluations + spent
    return res


def inner_minimize(
    problem: DynamicProblem,
    t: float,
    model: TcaModel,
    target,
    budget: int,
    rng: np.random.Generator,
    x0=None,
    n_probes: int = 8,
    init_step: float = 0.25,
    min_step: float = 1e-6,
) -> SearchResult:
    """Minimise ``||phi(F(x, t)) - target||^2`` over the box within ``budget`` evaluations.

    The search starts at ``x0`` if given, otherwise at the best of
    ``n_probes`` uniform probes.
    """
    if budget < 1:
        raise ArgumentError("budget must be at least 1")
    target = np.atleast_2d(np.asarray(target, dtype=float))
    res = _search_targets(
        problem, t, model, target, budget, [rng], n_probes, x0=x0,
        init_step=init_step, min_step=min_step,
    )
    return res


def tr_ipg(
    problem: DynamicProblem,
    t_prev: float,
    t_next: float,
    pof_prev,
    cfg: IpgConfig,
    rng: np.random.Generator,
    kernel: KernelSpec | None = None,
) -> IpgResult:
    """Build an initial population for ``F(., t_next)`` from the front found at ``t_prev``.

    Returns exactly ``cfg.target_pop_size`` decision vectors. The leading
    ``n_transferred`` rows come from latent-space inversion; any remaining
    rows are uniform random fill.
    """
    pof = np.atleast_2d(np.asarray(pof_prev, dtype=float))
    if pof.size == 0:
        raise ArgumentError("previous front is empty")
    if pof.shape[1] != problem.n_obj:
        raise ArgumentError("front vectors do not match the problem's objective count")

    Xs = sample_decision_space(problem, cfg.n_s, rng)
    Yt = sample_decision_space(problem, cfg.n_t_samples, rng)
    Fs = problem.evaluate(Xs, t_prev)
    Ft = problem.evaluate(Yt, t_next)
    model = tca_fit(Fs, Ft, kernel, d=cfg.d, mu=cfg.mu)

    if len(pof) > cfg.max_pof:
        keep = np.sort(rng.choice(len(pof), size=cfg.max_pof, replace=False))
        pof = pof[keep]
    targets = build_latent_targets(model, pof)

    stream = int(rng.integers(2**63))
    rngs = [np.random.default_rng([stream, i]) for i in range(len(targets))]
    res = _search_targets(
        problem, t_next, model, targets, cfg.inner_budget, rngs, cfg.n_probes,
        init_step=cfg.init_step, min_step=cfg.min_step,
    )

    N = cfg.target_pop_size
    if len(targets) >= N:
        chosen = np.sort(np.argsort(res.g, kind="stable")[:N])
        X = res.X[chosen]
        g = res.g[chosen]
    else:
        fill = sample_decision_space(problem, N - len(targets), rng)
        X = np.vstack([res.X, fill])
        g = res.g
    return IpgResult(
        X=X,
        n_transferred=len(g),
        g=g,
        model=model,
        targets=targets,
        source_bank=Fs,
        target_bank=Ft,
    )
