import csv
import json

import numpy as np
import pytest

from trdmoea.errors import ConfigError
from trdmoea.harness import (
    AGGREGATE_SEED,
    MANIFEST,
    RunConfig,
    build_report,
    config_from_dict,
    emit_pof_snapshots,
    emit_report,
    full_matrix,
    load_config,
    parse_seeds,
    read_record,
    record_payload,
    run_cells,
    run_experiment,
    worker_count,
)
from trdmoea.harness.cli import main
from trdmoea.metrics import CONFIG_IDS
from trdmoea.problems import PROBLEM_NAMES

SMALL = dict(pop_size=10, generations=2, inner_budget=5, n_s=20, n_t_samples=20, d=5)


def small_cfg(tmp_path, **kw):
    base = dict(problem="HE7", algorithm="tr-nsga2", config="C1", changes=3, seeds=(1,),
                out_dir=str(tmp_path), **SMALL)
    return RunConfig(**{**base, **kw})


def fake_record(problem, algorithm, config, seed, igds, hvs=None, epsilon=0.1):
    hvs = hvs if hvs is not None else [1.0] * len(igds)
    return {
        "format": "trdmoea-run/1", "seed": seed, "n_obj": 2, "hv_ref": [1.0, 1.0],
        "config": {"problem": problem, "algorithm": algorithm, "config": config, "epsilon": epsilon},
        "changes": [{"index": i, "t": i / 10, "archive": [[0.5, 0.5]], "igd": g, "hv": h}
                    for i, (g, h) in enumerate(zip(igds, hvs))],
    }


# --- configuration --------------------------------------------------------

def test_load_config_defaults(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"problem": "FDA4", "algorithm": "nsga2", "config": "C3"}))
    cfg = load_config(path)
    assert (cfg.pop_size, cfg.generations, cfg.d, cfg.mu) == (200, 50, 20, 0.5)
    assert cfg.seeds == (1, 2, 3, 4, 5) and cfg.epsilon == 0.1
    assert cfg.n_changes == 20


def test_load_config_overrides_and_empty_file(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"problem": "FDA4", "algorithm": "nsga2", "config": "C3",
                                "pop_size": 50}))
    assert load_config(path, pop_size=100).pop_size == 100
    assert load_config(path, pop_size=None).pop_size == 50
    empty = tmp_path / "empty.json"
    empty.write_text("")
    assert load_config(empty, problem="HE2", algorithm="mopso", config="C5").config == "C5"


@pytest.mark.parametrize("data, field", [
    ({"config": "C9"}, "config"),
    ({"problem": "ZDT1"}, "problem"),
    ({"algorithm": "moead"}, "algorithm"),
    ({"pop_size": 0}, "pop_size"),
    ({"mu": -1.0}, "mu"),
    ({"epsilon": 1.0}, "epsilon"),
    ({"seeds": [1, 1]}, "seeds"),
    ({"changes": 21}, "changes"),
    ({"colour": "red"}, "colour"),
])
def test_config_errors_name_the_field(data, field):
    base = {"problem": "FDA4", "algorithm": "nsga2", "config": "C1"}
    with pytest.raises(ConfigError) as info:
        config_from_dict({**base, **data})
    assert info.value.field == field


def test_bad_json_reports_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "problem": "FDA4",\n  oops\n}')
    with pytest.raises(ConfigError, match="line 3"):
        load_config(path)
    with pytest.raises(ConfigError, match="is required"):
        config_from_dict({"problem": "FDA4"})


def test_parse_seeds():
    assert parse_seeds("1..5") == (1, 2, 3, 4, 5)
    assert parse_seeds("3,7, 9") == (3, 7, 9)
    for bad in ("5..1", "a,b"):
        with pytest.raises(ConfigError):
            parse_seeds(bad)
    assert config_from_dict({"problem": "HE7", "algorithm": "nsga2", "config": "C1",
                             "seeds": "2..4"}).seeds == (2, 3, 4)


def test_snapshot_excludes_output_location(tmp_path):
    snap = small_cfg(tmp_path, timeout=5.0).snapshot()
    assert "out_dir" not in snap and "timeout" not in snap
    assert snap["time_model"] == {"n_t": 10, "tau_t": 5, "tau_T": 100}
    assert config_from_dict({k: v for k, v in snap.items() if k != "time_model"}) == \
        small_cfg(tmp_path, out_dir="runs")


# --- runner ---------------------------------------------------------------

def test_run_experiment_writes_one_record_per_seed(tmp_path):
    cfg = small_cfg(tmp_path, seeds=(1, 2, 3), pop_size=12)
    records = run_experiment(cfg)
    assert len(records) == 3 and [r["seed"] for r in records] == [1, 2, 3]
    for r in records:
        assert len(r["changes"]) == 3 and r["config"]["pop_size"] == 12
        on_disk = read_record(tmp_path / f"HE7__tr-nsga2__C1__seed{r['seed']}.json")
        assert record_payload(on_disk) == record_payload(r)
    assert not list(tmp_path.glob(".tmp-*"))


def test_full_c1_run_yields_twenty_changes(tmp_path):
    (record,) = run_experiment(small_cfg(tmp_path, changes=None, generations=1), write=False)
    assert len(record["changes"]) == 20
    assert [c["t"] for c in record["changes"]] == [k / 10 for k in range(20)]


def test_rerun_payload_identical(tmp_path):
    cfg = small_cfg(tmp_path, seeds=(4,))
    a = run_experiment(cfg, write=False)[0]
    b = run_experiment(cfg, write=False)[0]
    assert record_payload(a) == record_payload(b)


def test_baseline_pair_shares_schedule_and_reference(tmp_path):
    tr = run_experiment(small_cfg(tmp_path), write=False)[0]
    base = run_experiment(small_cfg(tmp_path, algorithm="nsga2"), write=False)[0]
    assert [c["t"] for c in tr["changes"]] == [c["t"] for c in base["changes"]]
    assert tr["hv_ref"] == base["hv_ref"]
    assert base["changes"][1]["n_transferred"] == 0 < tr["changes"][1]["n_transferred"]


def test_read_record_rejects_foreign_json(tmp_path):
    path = tmp_path / "x.json"
    path.write_text("{}")
    with pytest.raises(ValueError):
        read_record(path)


# --- reports --------------------------------------------------------------

def test_single_seed_variance_zero():
    rows = build_report([fake_record("HE7", "nsga2", "C1", 1, [0.2, 0.4])])["migd"]
    agg = [r for r in rows if r["seed"] == AGGREGATE_SEED]
    assert len(agg) == 1 and agg[0]["MIGD_variance"] == 0.0
    assert agg[0]["MIGD"] == pytest.approx(0.3)


def test_report_tables_by_hand():
    recs = []
    for i, c in enumerate(CONFIG_IDS):
        # base MIGD per seed: 0.3 and 0.5 -> mean 0.4; treated: 0.1 -> ROC 75
        recs += [fake_record("FDA4", "nsga2", c, 1, [0.3, 0.3]),
                 fake_record("FDA4", "nsga2", c, 2, [0.4, 0.6]),
                 fake_record("FDA4", "tr-nsga2", c, 1, [0.1 * (i + 1)] * 2, hvs=[1.0, 0.5])]
    rep = build_report(recs)
    base_agg = [r for r in rep["migd"] if r["algorithm"] == "nsga2" and r["seed"] == AGGREGATE_SEED]
    assert all(r["MIGD_variance"] == pytest.approx(0.01) for r in base_agg)
    roc_c1 = next(r for r in rep["roc"] if r["config"] == "C1")
    assert roc_c1["ROC"] == pytest.approx(75.0) and roc_c1["improved"]
    dm = {r["algorithm"]: r["DMIGD"] for r in rep["dmigd"]}
    assert dm["nsga2"] == pytest.approx(0.4) and dm["tr-nsga2"] == pytest.approx(0.45)
    dr = {r["algorithm"]: r["DMReact"] for r in rep["dmreact"]}
    assert dr["nsga2"] == 1.0
    assert dr["tr-nsga2"] == 1.0 and len(rep["flags"]) == 8  # capped at the horizon
    assert rep["gaps"] == []


def test_report_lists_gaps_and_keeps_order(tmp_path):
    recs = [fake_record("HE7", "tr-nsga2", "C2", 1, [0.1]),
            fake_record("FDA4", "nsga2", "C1", 2, [0.2]),
            fake_record("FDA4", "nsga2", "C1", 1, [0.3])]
    rep = build_report(recs)
    keys = [(r["problem"], r["algorithm"], r["config"], r["seed"]) for r in rep["migd"]]
    assert keys == [("FDA4", "nsga2", "C1", 1), ("FDA4", "nsga2", "C1", 2),
                    ("FDA4", "nsga2", "C1", AGGREGATE_SEED), ("HE7", "tr-nsga2", "C2", 1),
                    ("HE7", "tr-nsga2", "C2", AGGREGATE_SEED)]
    assert any("ROC HE7/tr-nsga2/C2" in g for g in rep["gaps"])
    assert any("FDA4/nsga2: missing C2" in g for g in rep["gaps"])

    paths = emit_report(recs, tmp_path)
    with open(paths["migd"]) as fh:
        rows = list(csv.DictReader(fh))
    assert rows[0]["MIGD"] == "0.3000" and rows[2]["MIGD_variance"] == "2.5000e-03"
    assert rows[0]["HV_ref"] == "1.0000 1.0000"
    assert len(paths["gaps"].read_text().splitlines()) == len(rep["gaps"])
    js = emit_report(recs, tmp_path / "j", fmt="json")
    assert json.loads(js["report"].read_text())["gaps"] == rep["gaps"]


def test_pof_snapshots(tmp_path):
    cfg = small_cfg(tmp_path, problem="FDA4", algorithm="nsga2")
    (record,) = run_experiment(cfg, write=False)
    paths = emit_pof_snapshots(record, tmp_path / "snap")
    assert len(paths) == 3
    with open(paths[1]) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["f1", "f2", "f3", "source"]
    arc = np.array([[float(v) for v in r[:3]] for r in rows[1:] if r[3] == "archive"])
    assert np.array_equal(arc, np.array(record["changes"][1]["archive"]))
    ref = np.array(record["hv_ref"])
    pof = np.array([[float(v) for v in r[:3]] for r in rows[1:] if r[3] == "true_pof"])
    assert len(pof) > 0 and np.all((pof >= 0) & (pof <= ref))
    # the reference is fixed from the true fronts, so unconverged archive
    # points may lie past it; HV simply discards them
    assert np.all(arc >= 0)


# --- batch and CLI --------------------------------------------------------

def test_full_matrix_size():
    cells = full_matrix("mopso", pop_size=20)
    assert len(cells) == len(PROBLEM_NAMES) * 8 * 2
    assert {c.algorithm for c in cells} == {"mopso", "tr-mopso"}


def test_batch_skip_force_and_manifest(tmp_path):
    cfgs = [small_cfg(tmp_path, changes=2, seeds=(1, 2)),
            small_cfg(tmp_path, changes=2, algorithm="nsga2", seeds=(1,))]
    first = run_cells(cfgs, tmp_path, workers=1)
    assert first.ok and len(first.completed) == 3 and not first.skipped
    manifest = json.loads((tmp_path / MANIFEST).read_text())
    assert manifest["completed"] == sorted(first.completed) and manifest["incomplete"] == {}
    again = run_cells(cfgs, tmp_path, workers=1)
    assert len(again.skipped) == 3 and not again.completed
    (tmp_path / "HE7__nsga2__C1__seed1.json").unlink()
    redo = run_cells(cfgs, tmp_path, workers=1)
    assert redo.completed == ["HE7__nsga2__C1__seed1.json"]
    assert len(run_cells(cfgs, tmp_path, workers=1, force=True).completed) == 3


def test_batch_parallel_matches_serial(tmp_path):
    cfgs = [small_cfg(tmp_path, changes=2, seeds=(1, 2))]
    run_cells(cfgs, tmp_path / "serial", workers=1)
    run_cells(cfgs, tmp_path / "par", workers=2)
    for seed in (1, 2):
        name = f"HE7__tr-nsga2__C1__seed{seed}.json"
        assert record_payload(read_record(tmp_path / "serial" / name)) == \
            record_payload(read_record(tmp_path / "par" / name))


def test_timeout_marks_cell_incomplete(tmp_path, capsys):
    out = run_cells([small_cfg(tmp_path, timeout=1e-9)], tmp_path, workers=1)
    assert not out.ok and "timeout" in next(iter(out.failed.values()))
    manifest = json.loads((tmp_path / MANIFEST).read_text())
    assert list(manifest["incomplete"]) == ["HE7__tr-nsga2__C1__seed1.json"]
    code = main(["run", "--problem", "HE7", "--algo", "nsga2", "--config", "C1",
                 "--out", str(tmp_path), "--changes", "2", "--pop-size", "10",
                 "--generations", "1", "--timeout", "1e-9"])
    assert code == 1


def test_worker_count_env(monkeypatch):
    monkeypatch.delenv("TRDMOEA_WORKERS", raising=False)
    assert worker_count() == 1
    monkeypatch.setenv("TRDMOEA_WORKERS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("TRDMOEA_WORKERS", "many")
    with pytest.raises(ValueError):
        worker_count()


def test_cli_run_report_snapshots(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"problem": "DMOP2", "algorithm": "nsga2", "config": "C1",
                               "n_s": 20, "n_t_samples": 20, "d": 5, "inner_budget": 5}))
    runs = tmp_path / "runs"
    common = ["--out", str(runs), "--changes", "2", "--pop-size", "10", "--generations", "1",
              "--seeds", "1,2"]
    assert main(["run", "--config-file", str(cfg)] + common) == 0
    assert main(["run", "--config-file", str(cfg), "--algo", "tr-nsga2"] + common) == 0
    assert len(list(runs.glob("*__seed*.json"))) == 4
    assert main(["report", "--in", str(runs)]) == 0
    assert "partial report" in capsys.readouterr().out
    assert (runs / "roc.csv").read_text().count("\n") == 2
    snaps = tmp_path / "snaps"
    assert main(["snapshots", "--run", str(runs / "DMOP2__nsga2__C1__seed1.json"),
                 "--out", str(snaps)]) == 0
    assert len(list(snaps.glob("*.csv"))) == 2


def test_cli_errors(tmp_path, capsys):
    assert main(["run", "--problem", "FDA4", "--algo", "nsga2", "--config", "C9",
                 "--out", str(tmp_path)]) == 2
    assert "config" in capsys.readouterr().err
    assert main(["report", "--in", str(tmp_path)]) == 1
