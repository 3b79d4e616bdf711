"""Execute configured runs and persist one JSON record per seed."""

from __future__ import annotations

import json
import os
import tempfile
import time
from datetime import datetime, timezone
from functools import lru_cache
from pathlib import Path

import numpy as np

from trdmoea import __version__
from trdmoea.harness.config import RunConfig
from trdmoea.metrics import hv_reference, hypervolume, igd
from trdmoea.moea.dynamic import trdmoea_run
from trdmoea.problems import ENV_CONFIGS, get_problem

RECORD_FORMAT = "trdmoea-run/1"
TIMING_KEY = "timing"  # the only part of a record allowed to differ between reruns


@lru_cache(maxsize=None)
def problem_hv_reference(problem_name: str) -> tuple[float, ...]:
    """HV reference point for a problem, shared by every config and algorithm.

    Taken over the true fronts at every change time of all eight configs so
    that accuracy ratios compare across changes and across configs.
    """
    problem = get_problem(problem_name)
    times = sorted({t for tm in ENV_CONFIGS.values() for t in tm.change_times()})
    return tuple(float(v) for v in hv_reference([problem.true_pof(t) for t in times]))


def record_name(problem: str, algorithm: str, config: str, seed: int) -> str:
    return f"{problem}__{algorithm}__{config}__seed{seed}.json"


def run_seed(cfg: RunConfig, seed: int, deadline: float | None = None) -> dict:
    """Run one seed of ``cfg`` and return its record (not written)."""
    problem = get_problem(cfg.problem)
    ref = problem_hv_reference(cfg.problem)
    rng = np.random.default_rng(seed)
    results = trdmoea_run(
        problem,
        cfg.algorithm,
        cfg.time_model,
        rng,
        pop_size=cfg.pop_size,
        generations=cfg.generations,
        changes=cfg.changes,
        ipg=cfg.ipg_config(),
        kernel=cfg.kernel_spec(),
        deadline=deadline,
    )
    changes = []
    for r in results:
        changes.append({
            "index": r.index,
            "t": r.t,
            "archive": r.archive.F.tolist(),
            "igd": igd(problem.true_pof(r.t), r.archive.F),
            "hv": hypervolume(r.archive.F, ref),
            "evaluations": r.evaluations,
            "source_evaluations": r.source_evaluations,
            "n_transferred": r.n_transferred,
        })
    return {
        "format": RECORD_FORMAT,
        "version": __version__,
        "config": cfg.snapshot(),
        "seed": seed,
        "n_obj": problem.n_obj,
        "hv_ref": list(ref),
        "changes": changes,
        TIMING_KEY: {
            "per_change_seconds": [r.seconds for r in results],
            "finished": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        },
    }


def record_payload(record: dict) -> bytes:
    """Canonical bytes of a record with timing removed, for reproducibility checks."""
    body = {k: v for k, v in record.items() if k != TIMING_KEY}
    return json.dumps(body, sort_keys=True).encode()


def write_record(record: dict, out_dir) -> Path:
    """Write ``record`` atomically (temp file plus rename) and return its path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    c = record["config"]
    path = out_dir / record_name(c["problem"], c["algorithm"], c["config"], record["seed"])
    fd, tmp = tempfile.mkstemp(dir=out_dir, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(record, fh, indent=1, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def read_record(path) -> dict:
    with open(path) as fh:
        record = json.load(fh)
    if record.get("format") != RECORD_FORMAT:
        raise ValueError(f"{path}: not a run record")
    return record


def run_experiment(cfg: RunConfig, write: bool = True) -> list[dict]:
    """Run every seed of ``cfg``; each record is written as soon as it finishes.

    Raises:
        RunTimeout: a seed exceeded ``cfg.timeout``. Records of earlier
            seeds are already on disk.
    """
    records = []
    for seed in cfg.seeds:
        deadline = None if cfg.timeout is None else time.monotonic() + cfg.timeout
        record = run_seed(cfg, seed, deadline)
        if write:
            write_record(record, cfg.out_dir)
        records.append(record)
    return records
