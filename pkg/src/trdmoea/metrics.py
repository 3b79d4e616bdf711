"""Front quality and robustness metrics: IGD family, hypervolume, React family, ROC."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from typing import NamedTuple

import numpy as np
from scipy.spatial.distance import cdist

from trdmoea.errors import ArgumentError, DegenerateError, UnsupportedError

CONFIG_IDS = ("C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8")
DEFAULT_EPSILON = 0.1


def igd(p_star, p) -> float:
    """Mean distance from each reference point to its nearest obtained point."""
    R = np.atleast_2d(np.asarray(p_star, dtype=float))
    P = np.atleast_2d(np.asarray(p, dtype=float))
    if R.size == 0 or P.size == 0:
        raise ArgumentError("IGD needs nonempty reference and approximation sets")
    if R.shape[1] != P.shape[1]:
        raise ArgumentError("reference and approximation differ in objective count")
    return float(cdist(R, P).min(axis=1).mean())


def migd(series: Sequence[float]) -> float:
    values = np.asarray(series, dtype=float)
    if values.size == 0:
        raise ArgumentError("MIGD of an empty series")
    return float(values.mean())


def _mean_over_configs(per_config: Mapping[str, float], what: str) -> float:
    missing = [c for c in CONFIG_IDS if c not in per_config]
    if missing:
        raise ArgumentError(f"{what} needs all eight configurations; missing {', '.join(missing)}")
    return float(np.mean([per_config[c] for c in CONFIG_IDS]))


def dmigd(per_config_migd: Mapping[str, float]) -> float:
    return _mean_over_configs(per_config_migd, "DMIGD")


def _hv2d(P: np.ndarray, ref: np.ndarray) -> float:
    order = np.lexsort((P[:, 1], P[:, 0]))
    P = P[order]
    volume = 0.0
    best_f2 = ref[1]
    for f1, f2 in P:
        if f2 < best_f2:
            volume += (ref[0] - f1) * (best_f2 - f2)
            best_f2 = f2
    return volume


def _hv3d(P: np.ndarray, ref: np.ndarray) -> float:
    P = P[np.argsort(P[:, 2], kind="stable")]
    volume = 0.0
    for i in range(len(P)):
        upper = P[i + 1, 2] if i + 1 < len(P) else ref[2]
        depth = upper - P[i, 2]
        if depth > 0:
            volume += _hv2d(P[: i + 1, :2], ref[:2]) * depth
    return volume


def hypervolume(p, ref) -> float:
    """Lebesgue measure of the region dominated by ``p`` and bounded by ``ref``.

    Points not componentwise <= ``ref`` are discarded. Two and three
    objectives are supported.
    """
    ref = np.asarray(ref, dtype=float)
    P = np.asarray(p, dtype=float).reshape(-1, ref.size)
    P = P[np.all(P <= ref, axis=1)]
    if len(P) == 0:
        return 0.0
    if ref.size == 2:
        return _hv2d(P, ref)
    if ref.size == 3:
        return _hv3d(P, ref)
    raise UnsupportedError(f"hypervolume for {ref.size} objectives is not implemented")


def hv_reference(fronts: Sequence[np.ndarray], margin: float = 0.1) -> np.ndarray:
    """Nadir of the union of ``fronts`` pushed out by ``margin`` of each objective's range."""
    allp = np.vstack([np.atleast_2d(f) for f in fronts])
    hi = allp.max(axis=0)
    span = hi - allp.min(axis=0)
    return hi + margin * np.where(span > 0, span, 1.0)


def accuracy(hv_series: Sequence[float]) -> np.ndarray:
    """Hypervolume of each step relative to the best step of the run."""
    hv = np.asarray(hv_series, dtype=float)
    if hv.size == 0 or not np.max(hv) > 0:
        raise DegenerateError("accuracy needs at least one positive hypervolume")
    return hv / hv.max()


class ReactResult(NamedTuple):
    steps: int
    capped: bool  # no recovery inside the horizon; steps is the remaining horizon


def react_detail(acc: Sequence[float], t: int, epsilon: float = DEFAULT_EPSILON) -> ReactResult:
    acc = np.asarray(acc, dtype=float)
    if not 0 < epsilon < 1:
        raise ArgumentError("epsilon must lie in (0, 1)")
    if not 0 <= t < len(acc) - 1:
        raise ArgumentError(f"react needs a step before the last one, got t={t}")
    # acc(t') / acc(t) >= 1 - eps, written without dividing by acc(t)
    later = np.flatnonzero(acc[t + 1:] >= (1.0 - epsilon) * acc[t])
    if later.size:
        return ReactResult(int(later[0]) + 1, False)
    return ReactResult(len(acc) - 1 - t, True)


def react(acc: Sequence[float], t: int, epsilon: float = DEFAULT_EPSILON) -> int:
    return react_detail(acc, t, epsilon).steps


def react_series(acc: Sequence[float], epsilon: float = DEFAULT_EPSILON) -> list[ReactResult]:
    return [react_detail(acc, t, epsilon) for t in range(len(acc) - 1)]


def mreact(reacts: Sequence[float]) -> float:
    values = np.asarray(reacts, dtype=float)
    if values.size == 0:
        raise ArgumentError("MReact of an empty series")
    return float(values.mean())


def dmreact(per_config_mreact: Mapping[str, float]) -> float:
    return _mean_over_configs(per_config_mreact, "DMReact")


def roc(base: float, treated: float) -> float:
    """Percent reduction of MIGD from ``base`` to ``treated``; positive is better."""
    if not base > 0:
        raise ArgumentError(f"ROC needs a positive base MIGD, got {base}")
    return 100.0 * (base - treated) / base
