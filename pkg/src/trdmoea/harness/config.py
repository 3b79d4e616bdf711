"""Run configuration: defaults, validation and JSON loading."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

from trdmoea.errors import ConfigError
from trdmoea.metrics import DEFAULT_EPSILON
from trdmoea.moea.dynamic import ALGORITHM_IDS
from trdmoea.problems import ENV_CONFIGS, PROBLEM_NAMES, TimeModel
from trdmoea.tca import GAUSSIAN, LINEAR, KernelSpec
from trdmoea.tr_ipg import IpgConfig


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one (problem, algorithm, config) cell.

    ``sigma=None`` selects the median-distance bandwidth for the Gaussian
    kernel. ``changes=None`` runs the full schedule of the environment
    config. ``timeout`` is wall-clock seconds per seed.
    """

    problem: str
    algorithm: str
    config: str
    pop_size: int = 200
    generations: int = 50
    changes: int | None = None
    seeds: tuple[int, ...] = (1, 2, 3, 4, 5)
    d: int = 20
    mu: float = 0.5
    kernel: str = GAUSSIAN
    sigma: float | None = None
    n_s: int = 100
    n_t_samples: int = 100
    inner_budget: int = 500
    max_pof: int = 500
    epsilon: float = DEFAULT_EPSILON
    out_dir: str = "runs"
    timeout: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "seeds", tuple(self.seeds))
        self.validate()

    def validate(self) -> None:
        if self.problem not in PROBLEM_NAMES:
            raise ConfigError(f"unknown problem {self.problem!r}", "problem")
        if self.algorithm not in ALGORITHM_IDS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}", "algorithm")
        if self.config not in ENV_CONFIGS:
            raise ConfigError(
                f"unknown environment config {self.config!r}; expected C1..C8", "config"
            )
        for name in ("pop_size", "d", "n_s", "n_t_samples", "inner_budget", "max_pof"):
            value = getattr(self, name)
            if not _is_int(value) or value < 1:
                raise ConfigError("must be a positive integer", name)
        if not _is_int(self.generations) or self.generations < 0:
            raise ConfigError("must be a non-negative integer", "generations")
        if self.changes is not None:
            if not _is_int(self.changes) or self.changes < 1:
                raise ConfigError("must be a positive integer", "changes")
            if self.changes > self.time_model.changes:
                raise ConfigError(
                    f"config {self.config} has only {self.time_model.changes} changes", "changes"
                )
        if not self.seeds or not all(_is_int(s) and s >= 0 for s in self.seeds):
            raise ConfigError("must be a nonempty list of non-negative integers", "seeds")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("contains duplicates", "seeds")
        if not _is_num(self.mu) or self.mu <= 0:
            raise ConfigError("must be positive", "mu")
        if self.kernel not in (GAUSSIAN, LINEAR):
            raise ConfigError(f"must be {GAUSSIAN!r} or {LINEAR!r}", "kernel")
        if self.sigma is not None and (not _is_num(self.sigma) or self.sigma <= 0):
            raise ConfigError("must be positive or null", "sigma")
        if not _is_num(self.epsilon) or not 0 < self.epsilon < 1:
            raise ConfigError("must lie in (0, 1)", "epsilon")
        if self.timeout is not None and (not _is_num(self.timeout) or self.timeout <= 0):
            raise ConfigError("must be positive or null", "timeout")

    @property
    def time_model(self) -> TimeModel:
        return ENV_CONFIGS[self.config]

    @property
    def n_changes(self) -> int:
        return self.changes if self.changes is not None else self.time_model.changes

    def ipg_config(self) -> IpgConfig:
        return IpgConfig(
            n_s=self.n_s,
            n_t_samples=self.n_t_samples,
            d=self.d,
            mu=self.mu,
            inner_budget=self.inner_budget,
            target_pop_size=self.pop_size,
            max_pof=self.max_pof,
        )

    def kernel_spec(self) -> KernelSpec | None:
        """Fixed kernel, or None to let each TCA fit pick the median bandwidth."""
        if self.kernel == LINEAR:
            return KernelSpec(LINEAR)
        return None if self.sigma is None else KernelSpec(GAUSSIAN, float(self.sigma))

    def snapshot(self) -> dict:
        """Effective settings that determine results (output location excluded)."""
        out = {f.name: getattr(self, f.name) for f in dataclasses.fields(self)
               if f.name not in ("out_dir", "timeout")}
        out["seeds"] = list(self.seeds)
        out["time_model"] = dataclasses.asdict(self.time_model)
        return out

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _is_num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


_FIELDS = {f.name for f in dataclasses.fields(RunConfig)}
_REQUIRED = ("problem", "algorithm", "config")


def config_from_dict(data: dict, **overrides) -> RunConfig:
    """Build a RunConfig from a mapping, applying defaults for absent keys."""
    if not isinstance(data, dict):
        raise ConfigError("top level must be a JSON object")
    merged = {**data, **{k: v for k, v in overrides.items() if v is not None}}
    for key in merged:
        if key not in _FIELDS:
            raise ConfigError("unknown setting", key)
    for key in _REQUIRED:
        if key not in merged:
            raise ConfigError("is required", key)
        if not isinstance(merged[key], str):
            raise ConfigError("must be a string", key)
    if "seeds" in merged:
        seeds = merged["seeds"]
        if isinstance(seeds, str):
            merged["seeds"] = parse_seeds(seeds)
        elif not isinstance(seeds, (list, tuple)):
            raise ConfigError("must be a list of integers or a range like 1..5", "seeds")
    return RunConfig(**merged)


def load_config(path, **overrides) -> RunConfig:
    """Read a JSON run configuration; keyword overrides win over file values."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return config_from_dict(data, **overrides)


def parse_seeds(text: str) -> tuple[int, ...]:
    """Parse ``"1..5"`` or ``"1,3,7"`` into a tuple of seeds."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ValueError
            return tuple(range(lo, hi + 1))
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise ConfigError(f"cannot parse {text!r}; use 1..5 or 1,2,3", "seeds") from None
