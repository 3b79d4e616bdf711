"""Parallel execution of many (problem, algorithm, config, seed) cells with a progress manifest."""

from __future__ import annotations

import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from trdmoea.harness.config import RunConfig, config_from_dict
from trdmoea.harness.runner import record_name, run_seed, write_record
from trdmoea.metrics import CONFIG_IDS
from trdmoea.moea.dynamic import RunTimeout
from trdmoea.problems import PROBLEM_NAMES

WORKERS_ENV = "TRDMOEA_WORKERS"
MANIFEST = "manifest.json"

log = logging.getLogger(__name__)


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    return max(n, 1)


def full_matrix(base: str = "nsga2", **settings) -> list[RunConfig]:
    """Every problem and config, each with the base algorithm and its transfer variant."""
    return [
        config_from_dict({"problem": p, "algorithm": a, "config": c, **settings})
        for p in PROBLEM_NAMES
        for c in CONFIG_IDS
        for a in (base, "tr-" + base)
    ]


@dataclass
class BatchOutcome:
    completed: list[str] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)
    failed: dict[str, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failed


def _load_manifest(out_dir: Path) -> dict:
    path = out_dir / MANIFEST
    if path.exists():
        return json.loads(path.read_text())
    return {"completed": [], "incomplete": {}}


def _save_manifest(out_dir: Path, manifest: dict) -> None:
    tmp = out_dir / (MANIFEST + ".tmp")
    manifest["completed"] = sorted(set(manifest["completed"]))
    tmp.write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    os.replace(tmp, out_dir / MANIFEST)


def _task(snapshot: dict, seed: int, out_dir: str, timeout: float | None) -> str:
    cfg = config_from_dict(snapshot)
    deadline = None if timeout is None else time.monotonic() + timeout
    record = run_seed(cfg, seed, deadline)
    return write_record(record, out_dir).name


def run_cells(
    configs: list[RunConfig], out_dir, workers: int | None = None, force: bool = False
) -> BatchOutcome:
    """Run every seed of every config, skipping cells the manifest marks complete.

    A seed that times out or raises is listed as incomplete; the rest of the
    batch carries on.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    workers = worker_count() if workers is None else max(workers, 1)
    manifest = _load_manifest(out_dir)
    done = set(manifest["completed"])
    outcome = BatchOutcome()

    tasks = []
    for cfg in configs:
        snap = {k: v for k, v in cfg.snapshot().items() if k != "time_model"}
        for seed in cfg.seeds:
            name = record_name(cfg.problem, cfg.algorithm, cfg.config, seed)
            if not force and name in done and (out_dir / name).exists():
                outcome.skipped.append(name)
                continue
            tasks.append((name, (snap, seed, str(out_dir), cfg.timeout)))

    def settle(name, fn):
        try:
            fn()
        except RunTimeout as exc:
            outcome.failed[name] = f"timeout: {exc}"
        except Exception as exc:  # noqa: BLE001 - one bad cell must not stop the batch
            outcome.failed[name] = f"{type(exc).__name__}: {exc}"
        else:
            outcome.completed.append(name)
            manifest["incomplete"].pop(name, None)
            manifest["completed"].append(name)
        if name in outcome.failed:
            manifest["incomplete"][name] = outcome.failed[name]
            log.warning("cell %s incomplete: %s", name, outcome.failed[name])
        else:
            log.info("cell %s done", name)
        _save_manifest(out_dir, manifest)

    if workers == 1:
        for name, args in tasks:
            settle(name, lambda args=args: _task(*args))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [(name, pool.submit(_task, *args)) for name, args in tasks]
            for name, fut in futures:
                settle(name, fut.result)
    return outcome
