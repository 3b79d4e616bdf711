"""Command line entry point: ``trdmoea run|batch|report|snapshots``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from trdmoea.errors import ConfigError
from trdmoea.harness.batch import full_matrix, run_cells
from trdmoea.harness.config import config_from_dict, load_config
from trdmoea.harness.report import emit_pof_snapshots, emit_report
from trdmoea.harness.runner import read_record


def _add_settings(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seeds", help="seed list, e.g. 1..5 or 1,2,3")
    p.add_argument("--pop-size", type=int, dest="pop_size")
    p.add_argument("--generations", type=int)
    p.add_argument("--changes", type=int, help="run only the first K changes")
    p.add_argument("--timeout", type=float, help="wall-clock seconds per seed")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--force", action="store_true", help="rerun cells already completed")
    p.add_argument("--workers", type=int, help="overrides TRDMOEA_WORKERS")


def _settings(args) -> dict:
    keys = ("seeds", "pop_size", "generations", "changes", "timeout", "epsilon")
    return {k: getattr(args, k) for k in keys if getattr(args, k) is not None}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trdmoea", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one problem/algorithm/config over seeds")
    run.add_argument("--problem")
    run.add_argument("--algo", dest="algorithm")
    run.add_argument("--config", help="environment config id C1..C8")
    run.add_argument("--config-file", help="JSON run config; flags override its values")
    run.add_argument("--out", required=True)
    _add_settings(run)

    batch = sub.add_parser("batch", help="run the full problem x config x {base, tr-} matrix")
    batch.add_argument("--matrix", choices=["full"], default="full")
    batch.add_argument("--base", default="nsga2", choices=["nsga2", "mopso", "rmmeda"])
    batch.add_argument("--out", required=True)
    _add_settings(batch)

    report = sub.add_parser("report", help="build tables from run records")
    report.add_argument("--in", dest="in_dir", required=True)
    report.add_argument("--format", choices=["csv", "json"], default="csv")
    report.add_argument("--out", help="defaults to the input directory")

    snap = sub.add_parser("snapshots", help="write per-change front CSVs for one record")
    snap.add_argument("--run", required=True)
    snap.add_argument("--out", required=True)
    return parser


def _report_outcome(outcome) -> int:
    print(f"completed {len(outcome.completed)}, skipped {len(outcome.skipped)}, "
          f"incomplete {len(outcome.failed)}")
    for name, reason in outcome.failed.items():
        print(f"  incomplete {name}: {reason}", file=sys.stderr)
    return 0 if outcome.ok else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "run":
            ids = {"problem": args.problem, "algorithm": args.algorithm, "config": args.config}
            overrides = {**_settings(args), "out_dir": args.out}
            if args.config_file:
                cfg = load_config(args.config_file, **ids, **overrides)
            else:
                cfg = config_from_dict({k: v for k, v in ids.items() if v is not None}, **overrides)
            return _report_outcome(run_cells([cfg], args.out, args.workers, args.force))
        if args.command == "batch":
            configs = full_matrix(args.base, out_dir=args.out, **_settings(args))
            return _report_outcome(run_cells(configs, args.out, args.workers, args.force))
        if args.command == "report":
            in_dir = Path(args.in_dir)
            records = [read_record(p) for p in sorted(in_dir.glob("*__seed*.json"))]
            if not records:
                print(f"no run records in {in_dir}", file=sys.stderr)
                return 1
            paths = emit_report(records, args.out or in_dir, args.format)
            for name, path in paths.items():
                print(f"{name}: {path}")
            gaps = paths["gaps"].read_text().splitlines()
            if gaps:
                print(f"partial report: {len(gaps)} coverage gap(s), see {paths['gaps']}")
            return 0
        if args.command == "snapshots":
            paths = emit_pof_snapshots(read_record(args.run), args.out)
            print(f"wrote {len(paths)} snapshot files to {args.out}")
            return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return 1


if __name__ == "__main__":
    sys.exit(main())
