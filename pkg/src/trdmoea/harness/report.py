"""Tables and plot data computed purely from persisted run records."""

from __future__ import annotations

import csv
import json
from collections import defaultdict
from pathlib import Path

import numpy as np

from trdmoea.errors import DegenerateError
from trdmoea.metrics import CONFIG_IDS, accuracy, dmigd, dmreact, migd, mreact, react_series, roc
from trdmoea.moea.dynamic import ALGORITHM_IDS, TRANSFER_PREFIX
from trdmoea.problems import PROBLEM_NAMES, get_problem

MIGD_COLUMNS = (
    "problem", "algorithm", "config", "seed",
    "MIGD", "MIGD_variance", "MReact", "HV_ref", "epsilon",
)
AGGREGATE_SEED = "mean"


def _fmt(x, spec=".4f") -> str:
    return "" if x is None or not np.isfinite(x) else format(x, spec)


def run_migd(record: dict) -> float:
    return migd([c["igd"] for c in record["changes"]])


def run_mreact(record: dict) -> tuple[float | None, int]:
    """MReact of one run and the number of capped (never recovered) steps.

    Returns ``(None, 0)`` when React is undefined: a single change, or no
    change with positive hypervolume.
    """
    hv = [c["hv"] for c in record["changes"]]
    if len(hv) < 2:
        return None, 0
    try:
        acc = accuracy(hv)
    except DegenerateError:
        return None, 0
    reacts = react_series(acc, record["config"]["epsilon"])
    return mreact([r.steps for r in reacts]), sum(r.capped for r in reacts)


def _cell_key(record: dict) -> tuple[str, str, str]:
    c = record["config"]
    return c["problem"], c["algorithm"], c["config"]


def _order(key: tuple[str, str, str]):
    problem, algorithm, config = key
    return (
        PROBLEM_NAMES.index(problem) if problem in PROBLEM_NAMES else len(PROBLEM_NAMES),
        ALGORITHM_IDS.index(algorithm) if algorithm in ALGORITHM_IDS else len(ALGORITHM_IDS),
        CONFIG_IDS.index(config) if config in CONFIG_IDS else len(CONFIG_IDS),
        key,
    )


def group_records(records) -> dict:
    """Records grouped by (problem, algorithm, config), seeds ascending, cells in table order."""
    cells = defaultdict(list)
    for r in records:
        cells[_cell_key(r)].append(r)
    return {k: sorted(cells[k], key=lambda r: r["seed"]) for k in sorted(cells, key=_order)}


def build_report(records) -> dict:
    """All report tables as lists of row dicts, plus coverage gaps and React flags.

    Variance is taken across seeds (population variance, so a single seed
    gives 0).
    """
    cells = group_records(records)
    migd_rows, summary, gaps, flags = [], {}, [], []

    for (problem, algorithm, config), recs in cells.items():
        seeds = [r["seed"] for r in recs]
        if len(set(seeds)) != len(seeds):
            gaps.append(f"{problem}/{algorithm}/{config}: duplicate seeds {seeds}")
        values, reacts = [], []
        for r in recs:
            m = run_migd(r)
            mr, capped = run_mreact(r)
            values.append(m)
            if mr is not None:
                reacts.append(mr)
            if capped:
                flags.append(
                    f"{problem}/{algorithm}/{config} seed {r['seed']}: "
                    f"{capped} React step(s) capped at the horizon"
                )
            migd_rows.append({
                "problem": problem, "algorithm": algorithm, "config": config,
                "seed": r["seed"], "MIGD": m, "MIGD_variance": None,
                "MReact": mr, "HV_ref": r["hv_ref"], "epsilon": r["config"]["epsilon"],
            })
        mean_migd = float(np.mean(values))
        mean_react = float(np.mean(reacts)) if reacts else None
        migd_rows.append({
            "problem": problem, "algorithm": algorithm, "config": config,
            "seed": AGGREGATE_SEED, "MIGD": mean_migd, "MIGD_variance": float(np.var(values)),
            "MReact": mean_react, "HV_ref": recs[0]["hv_ref"],
            "epsilon": recs[0]["config"]["epsilon"],
        })
        summary[(problem, algorithm, config)] = (mean_migd, mean_react)

    roc_rows = []
    for (problem, algorithm, config), (treated, _) in summary.items():
        if not algorithm.startswith(TRANSFER_PREFIX):
            continue
        base_id = algorithm[len(TRANSFER_PREFIX):]
        base = summary.get((problem, base_id, config))
        if base is None:
            gaps.append(f"ROC {problem}/{algorithm}/{config}: no {base_id} records")
            continue
        if not base[0] > 0:
            gaps.append(f"ROC {problem}/{algorithm}/{config}: base MIGD is zero")
            continue
        value = roc(base[0], treated)
        roc_rows.append({
            "problem": problem, "config": config, "base": base_id, "treated": algorithm,
            "base_MIGD": base[0], "treated_MIGD": treated, "ROC": value, "improved": value > 0,
        })

    by_pa = defaultdict(dict)
    for (problem, algorithm, config), vals in summary.items():
        by_pa[(problem, algorithm)][config] = vals
    dmigd_rows, dmreact_rows = [], []
    for (problem, algorithm), per in by_pa.items():
        missing = [c for c in CONFIG_IDS if c not in per]
        if missing:
            gaps.append(f"DMIGD/DMReact {problem}/{algorithm}: missing {', '.join(missing)}")
            continue
        dmigd_rows.append({
            "problem": problem, "algorithm": algorithm,
            "DMIGD": dmigd({c: per[c][0] for c in CONFIG_IDS}),
        })
        if all(per[c][1] is not None for c in CONFIG_IDS):
            dmreact_rows.append({
                "problem": problem, "algorithm": algorithm,
                "DMReact": dmreact({c: per[c][1] for c in CONFIG_IDS}),
            })
        else:
            gaps.append(f"DMReact {problem}/{algorithm}: React undefined for some config")

    return {
        "migd": migd_rows, "roc": roc_rows, "dmigd": dmigd_rows,
        "dmreact": dmreact_rows, "gaps": gaps, "flags": flags,
    }


def _csv_cell(key: str, value) -> str:
    if isinstance(value, bool):
        return "yes" if value else ""
    if key == "MIGD_variance":
        return _fmt(value, ".4e")
    if key == "HV_ref":
        return " ".join(_fmt(v) for v in value)
    if isinstance(value, float):
        return _fmt(value)
    return "" if value is None else str(value)


def _write_csv(path: Path, rows, columns) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_csv_cell(c, row[c]) for c in columns])


def emit_report(records, out_dir, fmt: str = "csv") -> dict[str, Path]:
    """Write the MIGD, ROC, DMIGD and DMReact tables plus gap and flag listings.

    Returns:
        Mapping from table name to written path.
    """
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown report format {fmt!r}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tables = build_report(records)
    paths = {}
    if fmt == "json":
        path = out_dir / "report.json"
        path.write_text(json.dumps(tables, indent=1) + "\n")
        paths["report"] = path
    else:
        columns = {
            "migd": MIGD_COLUMNS,
            "roc": ("problem", "config", "base", "treated",
                    "base_MIGD", "treated_MIGD", "ROC", "improved"),
            "dmigd": ("problem", "algorithm", "DMIGD"),
            "dmreact": ("problem", "algorithm", "DMReact"),
        }
        for name, cols in columns.items():
            paths[name] = out_dir / f"{name}.csv"
            _write_csv(paths[name], tables[name], cols)
    paths["gaps"] = out_dir / "gaps.txt"
    paths["gaps"].write_text("".join(g + "\n" for g in tables["gaps"]))
    paths["flags"] = out_dir / "flags.txt"
    paths["flags"].write_text("".join(f + "\n" for f in tables["flags"]))
    return paths


def emit_pof_snapshots(record: dict, out_dir) -> list[Path]:
    """One CSV per change: archive points and the true front sample at that t."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    c = record["config"]
    problem = get_problem(c["problem"])
    M = record["n_obj"]
    stem = f"{c['problem']}__{c['algorithm']}__{c['config']}__seed{record['seed']}"
    header = [f"f{i + 1}" for i in range(M)] + ["source"]
    paths = []
    for change in record["changes"]:
        path = out_dir / f"{stem}__change{change['index']:02d}.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in change["archive"]:
                w.writerow([repr(float(v)) for v in row] + ["archive"])
            for row in problem.true_pof(change["t"]):
                w.writerow([repr(float(v)) for v in row] + ["true_pof"])
        paths.append(path)
    return paths
