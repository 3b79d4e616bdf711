"""Dynamic outer loop: solve each environment in turn, optionally seeding with Tr-IPG."""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass

import numpy as np

from trdmoea.errors import ArgumentError
from trdmoea.moea.core import Archive
from trdmoea.moea.mopso import mopso_run
from trdmoea.moea.nsga2 import nsga2_run
from trdmoea.moea.rmmeda import rmmeda_run
from trdmoea.problems import DynamicProblem, TimeModel, sample_decision_space
from trdmoea.tca import KernelSpec
from trdmoea.tr_ipg import IpgConfig, tr_ipg

BASE_ALGORITHMS = {
    "nsga2": nsga2_run,
    "mopso": mopso_run,
    "rmmeda": rmmeda_run,
}
TRANSFER_PREFIX = "tr-"
ALGORITHM_IDS: tuple[str, ...] = tuple(BASE_ALGORITHMS) + tuple(
    TRANSFER_PREFIX + a for a in BASE_ALGORITHMS
)


class RunTimeout(RuntimeError):
    """The wall-clock allowance of a run ran out between environments."""


def parse_algorithm(algorithm: str) -> tuple[str, bool]:
    """Split an algorithm id into (base id, transfer enabled)."""
    if algorithm not in ALGORITHM_IDS:
        raise ArgumentError(
            f"unknown algorithm {algorithm!r}; expected one of {', '.join(ALGORITHM_IDS)}"
        )
    if algorithm.startswith(TRANSFER_PREFIX):
        return algorithm[len(TRANSFER_PREFIX):], True
    return algorithm, False


class CountingProblem:
    """Proxy that counts objective evaluations by (phase, t).

    ``phase`` is set by the caller (the change index in ``trdmoea_run``).
    """

    def __init__(self, problem: DynamicProblem):
        self.problem = problem
        self.phase = None
        self.counts: Counter = Counter()

    def __getattr__(self, name):
        return getattr(self.problem, name)

    def evaluate(self, x, t):
        F = self.problem.evaluate(x, t)
        self.counts[(self.phase, float(t))] += 1 if np.ndim(x) == 1 else len(x)
        return F

    def count(self, phase=None, t=None) -> int:
        return sum(
            c for (p, tt), c in self.counts.items()
            if (phase is None or p == phase) and (t is None or tt == float(t))
        )


@dataclass
class ChangeResult:
    index: int
    t: float
    archive: Archive
    evaluations: int  # evaluations of F(., t) made while handling this change
    source_evaluations: int  # evaluations of the previous environment spent on the source bank
    n_transferred: int
    seconds: float


def trdmoea_run(
    problem: DynamicProblem,
    algorithm: str,
    time_model: TimeModel,
    rng: np.random.Generator,
    *,
    pop_size: int = 200,
    generations: int = 50,
    changes: int | None = None,
    ipg: IpgConfig | None = None,
    kernel: KernelSpec | None = None,
    moa_params=None,
    deadline: float | None = None,
) -> list[ChangeResult]:
    """Track the front of ``problem`` across the scheduled environments.

    The first environment starts from a uniform random population. Later
    environments start from Tr-IPG output when ``algorithm`` carries the
    ``tr-`` prefix and from a fresh random population otherwise.

    Args:
        deadline: ``time.monotonic()`` value after which the run stops with
            :class:`RunTimeout` before starting the next environment.
    """
    base, transfer = parse_algorithm(algorithm)
    moa = BASE_ALGORITHMS[base]
    if pop_size < 1 or generations < 0:
        raise ArgumentError("pop_size must be positive and generations non-negative")
    if ipg is None:
        ipg = IpgConfig(target_pop_size=pop_size)
    elif ipg.target_pop_size != pop_size:
        raise ArgumentError("ipg.target_pop_size must equal pop_size")
    times = time_model.change_times(changes)
    counter = CountingProblem(problem)

    results: list[ChangeResult] = []
    archive = None
    for k, t in enumerate(times):
        if deadline is not None and time.monotonic() > deadline:
            raise RunTimeout(f"deadline passed before change {k}")
        started = time.perf_counter()
        counter.phase = k
        n_transferred = 0
        if transfer and archive is not None:
            seeded = tr_ipg(counter, archive.t, t, archive.F, ipg, rng, kernel=kernel)
            X0 = seeded.X
            n_transferred = seeded.n_transferred
        else:
            X0 = sample_decision_space(problem, pop_size, rng)
        kwargs = {} if moa_params is None else {"params": moa_params}
        archive = moa(counter, t, X0, generations, rng, **kwargs)
        prev_t = results[-1].t if results else None
        results.append(
            ChangeResult(
                index=k,
                t=t,
                archive=archive,
                evaluations=counter.count(phase=k, t=t),
                source_evaluations=(
                    counter.count(phase=k, t=prev_t) if prev_t is not None and prev_t != t else 0
                ),
                n_transferred=n_transferred,
                seconds=time.perf_counter() - started,
            )
        )
    return results
