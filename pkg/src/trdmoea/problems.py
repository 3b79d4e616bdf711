"""Dynamic multiobjective benchmark problems and the discrete time model.

The twelve problems follow the CEC 2015 dynamic multiobjective benchmark
set (FDA, dMOP, DIMP and HE families). Every problem evaluates batches of
decision vectors at a scalar time ``t`` and can sample its true Pareto
front at that time, which serves as the IGD reference set.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from trdmoea.errors import ArgumentError, DomainError, ProblemDefinitionError

__all__ = [
    "DmopType",
    "TimeModel",
    "ENV_CONFIGS",
    "DynamicProblem",
    "PROBLEM_NAMES",
    "get_problem",
    "time_at",
    "sample_decision_space",
    "write_pof_csv",
]

# Isolation/deception transform parameters for the *_iso and *_dec variants.
# A is time dependent and equals G(t); these are the fixed B and C values.
FLAT_B = 0.001
FLAT_C = 0.05
DECEPT_B = 0.001
DECEPT_C = 0.05

_BOUND_TOL = 1e-12


class DmopType(enum.Enum):
    TYPE_I = "TypeI"  # POS moves, POF static
    TYPE_II = "TypeII"  # both move
    TYPE_III = "TypeIII"  # POF moves, POS static


@dataclass(frozen=True)
class TimeModel:
    """Severity ``n_t``, frequency ``tau_t`` and horizon ``tau_T`` of change."""

    n_t: int
    tau_t: int
    tau_T: int

    def __post_init__(self):
        for name in ("n_t", "tau_t", "tau_T"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ArgumentError(f"{name} must be a positive integer, got {value!r}")
        if self.tau_T % self.tau_t:
            raise ArgumentError("tau_T must be an integer multiple of tau_t")

    @property
    def changes(self) -> int:
        return self.tau_T // self.tau_t

    def time_at(self, tau: int) -> float:
        return time_at(tau, self)

    def change_times(self, changes: int | None = None) -> list[float]:
        """Time value in force at the start of each environment."""
        count = self.changes if changes is None else changes
        if not 1 <= count <= self.changes:
            raise ArgumentError(f"changes must be in [1, {self.changes}], got {count}")
        return [self.time_at(k * self.tau_t) for k in range(count)]


ENV_CONFIGS: dict[str, TimeModel] = {
    "C1": TimeModel(10, 5, 100),
    "C2": TimeModel(10, 10, 200),
    "C3": TimeModel(10, 25, 500),
    "C4": TimeModel(10, 50, 1000),
    "C5": TimeModel(1, 10, 200),
    "C6": TimeModel(1, 50, 1000),
    "C7": TimeModel(20, 10, 200),
    "C8": TimeModel(20, 50, 1000),
}


def time_at(tau: int, tm: TimeModel) -> float:
    """Return t = floor(tau / tau_t) / n_t for the running iteration counter ``tau``."""
    if tau < 0 or tau > tm.tau_T:
        raise ArgumentError(f"tau={tau} outside [0, {tm.tau_T}]")
    return (int(tau) // tm.tau_t) / tm.n_t


# --- transforms -----------------------------------------------------------


def b_flat(y: np.ndarray, A: float, B: float, C: float) -> np.ndarray:
    """WFG flat-region bias: maps ``[B, C]`` onto the constant ``A``."""
    y = np.asarray(y, dtype=float)
    return (
        A
        + np.minimum(0.0, np.floor(y - B)) * A * (B - y) / B
        - np.minimum(0.0, np.floor(C - y)) * (1.0 - A) * (y - C) / (1.0 - C)
    )


def s_decept(y: np.ndarray, A: float, B: float, C: float) -> np.ndarray:
    """WFG deceptive shift: global minimum 0 at ``A``, deceptive minima ``C`` at 0 and 1."""
    y = np.asarray(y, dtype=float)
    return 1.0 + (np.abs(y - A) - B) * (
        np.floor(y - A + B) * (1.0 - C + (A - B) / B) / (A - B)
        + np.floor(A + B - y) * (1.0 - C + (1.0 - A - B) / B) / (1.0 - A - B)
        + 1.0 / B
    )


def _decept_center(g: float) -> float:
    # s_decept needs B < A < 1 - B
    return float(np.clip(g, 2 * DECEPT_B, 1.0 - 2 * DECEPT_B))


def _sin_half_pi(t: float) -> float:
    return math.sin(0.5 * math.pi * t)


# --- front samplers -------------------------------------------------------


def _sphere_front(radius: float, k: int) -> np.ndarray:
    """Exactly ``k`` points of the positive octant of a sphere from an angle grid."""
    side = max(2, math.ceil(math.sqrt(k)))
    while True:
        u = np.linspace(0.0, 1.0, side)
        u1, u2 = np.meshgrid(u, u, indexing="ij")
        a, b = 0.5 * math.pi * u1.ravel(), 0.5 * math.pi * u2.ravel()
        P = np.column_stack([np.cos(a) * np.cos(b), np.cos(a) * np.sin(b), np.sin(a)])
        # the u1 = 1 row collapses onto the pole
        _, first = np.unique(np.round(P, 12), axis=0, return_index=True)
        P = P[np.sort(first)]
        if len(P) >= k:
            return radius * _thin(P, k)
        side += 1


def _nondominated_curve(f1: np.ndarray, f2: np.ndarray) -> np.ndarray:
    order = np.lexsort((f2, f1))
    f1, f2 = f1[order], f2[order]
    keep = np.empty(f1.size, dtype=bool)
    best = np.inf
    for i, v in enumerate(f2):
        keep[i] = v < best
        best = min(best, v)
    return np.column_stack([f1[keep], f2[keep]])


def _thin(points: np.ndarray, k: int) -> np.ndarray:
    if len(points) <= k:
        return points
    idx = np.unique(np.round(np.linspace(0, len(points) - 1, k)).astype(int))
    return points[idx]


# --- problem base ---------------------------------------------------------


class DynamicProblem:
    """Box-constrained dynamic multiobjective problem F(x, t).

    Subclasses provide ``_objectives`` (batched, no checks) and ``_front``.
    """

    name: str = ""
    n_var: int = 0
    n_obj: int = 0
    dmop_type: DmopType = DmopType.TYPE_I
    # the first _split variables use _head_bounds, the rest _tail_bounds
    _split: int = 1
    _head_bounds: tuple[float, float] = (0.0, 1.0)
    _tail_bounds: tuple[float, float] = (0.0, 1.0)

    def __init__(self):
        lower = np.full(self.n_var, self._tail_bounds[0])
        upper = np.full(self.n_var, self._tail_bounds[1])
        lower[: self._split] = self._head_bounds[0]
        upper[: self._split] = self._head_bounds[1]
        lower.flags.writeable = False
        upper.flags.writeable = False
        self.lower = lower
        self.upper = upper

    def __repr__(self):
        return f"{type(self).__name__}(n_var={self.n_var}, n_obj={self.n_obj})"

    def evaluate(self, x, t: float) -> np.ndarray:
        """Objective vector(s) for ``x`` of shape (n,) or (k, n) at time ``t``."""
        X = np.asarray(x, dtype=float)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        if X.shape[1] != self.n_var:
            raise ArgumentError(f"{self.name} expects {self.n_var} variables, got {X.shape[1]}")
        if t < 0:
            raise ArgumentError(f"t must be non-negative, got {t}")
        if np.any(X < self.lower - _BOUND_TOL) or np.any(X > self.upper + _BOUND_TOL):
            raise DomainError(f"decision vector outside the bounds of {self.name}")
        F = self._objectives(X, float(t))
        if not np.all(np.isfinite(F)):
            raise ProblemDefinitionError(f"{self.name} produced a non-finite objective at t={t}")
        return F[0] if single else F

    def true_pof(self, t: float, k: int | None = None) -> np.ndarray:
        """Sample ``k`` points of the Pareto-optimal front at time ``t``."""
        if k is None:
            k = 500 if self.n_obj == 2 else 33 * 33
        if k < 2:
            raise ArgumentError("k must be at least 2")
        return self._front(float(t), int(k))

    def _objectives(self, X: np.ndarray, t: float) -> np.ndarray:
        raise NotImplementedError

    def _front(self, t: float, k: int) -> np.ndarray:
        raise NotImplementedError


# --- FDA family -----------------------------------------------------------


class _FdaBase(DynamicProblem):
    n_var = 12
    n_obj = 3
    _split = 2

    @staticmethod
    def G(t: float) -> float:
        return abs(_sin_half_pi(t))

    def _spherical(self, Y: np.ndarray, radius: np.ndarray) -> np.ndarray:
        a = 0.5 * np.pi * Y[:, 0]
        b = 0.5 * np.pi * Y[:, 1]
        return radius[:, None] * np.column_stack(
            [np.cos(a) * np.cos(b), np.cos(a) * np.sin(b), np.sin(a)]
        )


class FDA4(_FdaBase):
    name = "FDA4"
    dmop_type = DmopType.TYPE_I

    def _objectives(self, X, t):
        g = np.sum((X[:, 2:] - self.G(t)) ** 2, axis=1)
        return self._spherical(X[:, :2], 1.0 + g)

    def _front(self, t, k):
        return _sphere_front(1.0, k)


class FDA5(_FdaBase):
    name = "FDA5"
    dmop_type = DmopType.TYPE_II

    @staticmethod
    def F(t: float) -> float:
        return 1.0 + 100.0 * _sin_half_pi(t) ** 4

    def _distance(self, tail: np.ndarray, t: float) -> np.ndarray:
        return np.sum((tail - self.G(t)) ** 2, axis=1)

    def _objectives(self, X, t):
        g = self.G(t) + self._distance(X[:, 2:], t)
        return self._spherical(X[:, :2] ** self.F(t), 1.0 + g)

    def _front(self, t, k):
        return _sphere_front(1.0 + self.G(t), k)


class FDA5Iso(FDA5):
    name = "FDA5_iso"

    def _distance(self, tail, t):
        G = self.G(t)
        return np.sum((b_flat(tail, G, FLAT_B, FLAT_C) - G) ** 2, axis=1)


class FDA5Dec(FDA5):
    name = "FDA5_dec"

    def _distance(self, tail, t):
        y = s_decept(tail, _decept_center(self.G(t)), DECEPT_B, DECEPT_C)
        return np.sum(y**2, axis=1)


# --- DIMP2 ----------------------------------------------------------------


class DIMP2(DynamicProblem):
    name = "DIMP2"
    n_var = 10
    n_obj = 2
    dmop_type = DmopType.TYPE_I
    _tail_bounds = (-2.0, 2.0)

    def G(self, t: float) -> np.ndarray:
        i = np.arange(2, self.n_var + 1)
        return np.sin(0.5 * np.pi * t + 2 * np.pi * i / (self.n_var + 1)) ** 2

    def _objectives(self, X, t):
        d = X[:, 1:] - self.G(t)
        g = 1 + 2 * (self.n_var - 1) + np.sum(d**2 - 2 * np.cos(3 * np.pi * d), axis=1)
        f1 = X[:, 0]
        return np.column_stack([f1, g * (1 - np.sqrt(f1 / g))])

    def _front(self, t, k):
        f1 = np.linspace(0.0, 1.0, k)
        return np.column_stack([f1, 1 - np.sqrt(f1)])


# --- dMOP family ----------------------------------------------------------


class DMOP2(DynamicProblem):
    name = "DMOP2"
    n_var = 10
    n_obj = 2
    dmop_type = DmopType.TYPE_II

    @staticmethod
    def G(t: float) -> float:
        return _sin_half_pi(t)

    @staticmethod
    def H(t: float) -> float:
        return 0.75 * _sin_half_pi(t) + 1.25

    def _g(self, tail: np.ndarray, t: float) -> np.ndarray:
        return 1 + 9 * np.sum((tail - self.G(t)) ** 2, axis=1)

    def _g_min(self, t: float) -> float:
        # optimum x_i = G(t) may leave [0, 1]; the attainable minimum sits on the bound
        gap = self.G(t) - np.clip(self.G(t), 0.0, 1.0)
        return 1 + 9 * (self.n_var - 1) * gap**2

    def _objectives(self, X, t):
        f1 = X[:, 0]
        g = self._g(X[:, 1:], t)
        return np.column_stack([f1, g * (1 - (f1 / g) ** self.H(t))])

    def _front(self, t, k):
        f1 = np.linspace(0.0, 1.0, k)
        g = self._g_min(t)
        return np.column_stack([f1, g * (1 - (f1 / g) ** self.H(t))])


class DMOP2Iso(DMOP2):
    name = "DMOP2_iso"

    def _g(self, tail, t):
        G = self.G(t)
        return 1 + np.sum((b_flat(tail, G, FLAT_B, FLAT_C) - G) ** 2, axis=1)

    def _g_min(self, t):
        return 1.0


class DMOP2Dec(DMOP2):
    name = "DMOP2_dec"

    def _g(self, tail, t):
        y = s_decept(tail, _decept_center(self.G(t)), DECEPT_B, DECEPT_C)
        return 1 + np.sum(y**2, axis=1)

    def _g_min(self, t):
        return 1.0


class DMOP3(DynamicProblem):
    name = "DMOP3"
    n_var = 10
    n_obj = 2
    dmop_type = DmopType.TYPE_I

    @staticmethod
    def G(t: float) -> float:
        return abs(_sin_half_pi(t))

    def position(self, t: float) -> int:
        """Index of the variable that acts as f1; redrawn per environment, fixed by t."""
        rng = np.random.default_rng([0xD3, int(round(t * 1_000_000))])
        return int(rng.integers(self.n_var))

    def _objectives(self, X, t):
        r = self.position(t)
        f1 = X[:, r]
        rest = np.delete(X, r, axis=1)
        g = 1 + 9 * np.sum((rest - self.G(t)) ** 2, axis=1)
        return np.column_stack([f1, g * (1 - np.sqrt(f1 / g))])

    def _front(self, t, k):
        f1 = np.linspace(0.0, 1.0, k)
        return np.column_stack([f1, 1 - np.sqrt(f1)])


# --- HE family ------------------------------------------------------------


def _he_H(t: float) -> float:
    return 0.75 * _sin_half_pi(t) + 1.25


class HE2(DynamicProblem):
    name = "HE2"
    n_var = 30
    n_obj = 2
    dmop_type = DmopType.TYPE_III

    @staticmethod
    def _h(ratio: np.ndarray, f1: np.ndarray, H: float) -> np.ndarray:
        return 1 - np.sqrt(ratio) ** H - ratio**H * np.sin(10 * np.pi * f1)

    def _objectives(self, X, t):
        f1 = X[:, 0]
        g = 1 + 9 / (self.n_var - 1) * np.sum(X[:, 1:], axis=1)
        return np.column_stack([f1, g * self._h(f1 / g, f1, _he_H(t))])

    def _front(self, t, k):
        f1 = np.linspace(0.0, 1.0, 20001)
        front = _nondominated_curve(f1, self._h(f1, f1, _he_H(t)))
        return _thin(front, k)


class _HeUfBase(DynamicProblem):
    n_var = 10
    n_obj = 2
    dmop_type = DmopType.TYPE_III
    _tail_bounds = (-1.0, 1.0)

    def _targets(self, x1: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Optimal values of the odd- and even-indexed tail variables given x1."""
        raise NotImplementedError

    def _g_base(self, x1: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _objectives(self, X, t):
        x1 = X[:, 0]
        odd_target, even_target = self._targets(x1)
        odd = X[:, 2::2]  # x3, x5, ...
        even = X[:, 1::2]  # x2, x4, ...
        f1 = x1 + 2 / odd.shape[1] * np.sum((odd - odd_target) ** 2, axis=1)
        g = self._g_base(x1) + 2 / even.shape[1] * np.sum((even - even_target) ** 2, axis=1)
        return np.column_stack([f1, g * (1 - (f1 / g) ** _he_H(t))])

    def _front(self, t, k):
        x1 = np.linspace(0.0, 1.0, k)
        g = self._g_base(x1)
        return np.column_stack([x1, g * (1 - (x1 / g) ** _he_H(t))])

    def _phase(self, x1: np.ndarray, idx: np.ndarray) -> np.ndarray:
        return 6 * np.pi * x1[:, None] + idx[None, :] * np.pi / self.n_var


class HE7(_HeUfBase):
    name = "HE7"

    def _targets(self, x1):
        odd_idx = np.arange(3, self.n_var + 1, 2)
        even_idx = np.arange(2, self.n_var + 1, 2)

        def amp(idx):
            return 0.3 * x1[:, None] ** 2 * np.cos(
                24 * np.pi * x1[:, None] + 4 * idx[None, :] * np.pi / self.n_var
            ) + 0.6 * x1[:, None]

        return (
            amp(odd_idx) * np.cos(self._phase(x1, odd_idx)),
            amp(even_idx) * np.sin(self._phase(x1, even_idx)),
        )

    def _g_base(self, x1):
        return 2 - np.sqrt(x1)


class HE9(_HeUfBase):
    name = "HE9"

    def _targets(self, x1):
        odd_idx = np.arange(3, self.n_var + 1, 2)
        even_idx = np.arange(2, self.n_var + 1, 2)
        return np.sin(self._phase(x1, odd_idx)), np.sin(self._phase(x1, even_idx))

    def _g_base(self, x1):
        return 2 - x1**2


# --- registry -------------------------------------------------------------


_REGISTRY: dict[str, type[DynamicProblem]] = {
    cls.name: cls
    for cls in (
        FDA4,
        FDA5,
        FDA5Iso,
        FDA5Dec,
        DIMP2,
        DMOP2,
        DMOP2Iso,
        DMOP2Dec,
        DMOP3,
        HE2,
        HE7,
        HE9,
    )
}

PROBLEM_NAMES: tuple[str, ...] = tuple(_REGISTRY)


def get_problem(name: str) -> DynamicProblem:
    try:
        return _REGISTRY[name]()
    except KeyError:
        raise ArgumentError(
            f"unknown problem {name!r}; expected one of {', '.join(PROBLEM_NAMES)}"
        ) from None


def sample_decision_space(problem: DynamicProblem, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``count`` decision vectors uniformly from the problem's box."""
    if count < 1:
        raise ArgumentError("count must be at least 1")
    return rng.uniform(problem.lower, problem.upper, size=(count, problem.n_var))


def write_pof_csv(points: np.ndarray, path: str | Path) -> None:
    points = np.atleast_2d(points)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"f{i + 1}" for i in range(points.shape[1])])
        writer.writerows([[repr(float(v)) for v in row] for row in points])
