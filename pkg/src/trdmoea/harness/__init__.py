"""Experiment orchestration: configs, seeded runs, persisted records and reports."""

from trdmoea.harness.batch import MANIFEST, BatchOutcome, full_matrix, run_cells, worker_count
from trdmoea.harness.config import RunConfig, config_from_dict, load_config, parse_seeds
from trdmoea.harness.report import AGGREGATE_SEED, build_report, emit_pof_snapshots, emit_report
from trdmoea.harness.runner import (
    problem_hv_reference,
    read_record,
    record_payload,
    run_experiment,
    run_seed,
    write_record,
)

__all__ = [
    "AGGREGATE_SEED", "MANIFEST", "BatchOutcome", "RunConfig", "build_report", "config_from_dict", "emit_pof_snapshots",
    "emit_report", "full_matrix", "load_config", "parse_seeds", "problem_hv_reference",
    "read_record", "record_payload", "run_cells", "run_experiment", "run_seed",
    "worker_count", "write_record",
]
