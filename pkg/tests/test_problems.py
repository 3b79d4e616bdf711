import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.distance import cdist

from trdmoea import problems as pb
from trdmoea.errors import ArgumentError, DomainError
from trdmoea.problems import (
    ENV_CONFIGS,
    PROBLEM_NAMES,
    DmopType,
    TimeModel,
    get_problem,
    sample_decision_space,
    time_at,
    write_pof_csv,
)

TABLE2 = {
    "FDA4": (12, 3, "TypeI"),
    "FDA5": (12, 3, "TypeII"),
    "FDA5_iso": (12, 3, "TypeII"),
    "FDA5_dec": (12, 3, "TypeII"),
    "DIMP2": (10, 2, "TypeI"),
    "DMOP2": (10, 2, "TypeII"),
    "DMOP2_iso": (10, 2, "TypeII"),
    "DMOP2_dec": (10, 2, "TypeII"),
    "DMOP3": (10, 2, "TypeI"),
    "HE2": (30, 2, "TypeIII"),
    "HE7": (10, 2, "TypeIII"),
    "HE9": (10, 2, "TypeIII"),
}
TABLE3 = {
    "C1": (10, 5, 100), "C2": (10, 10, 200), "C3": (10, 25, 500), "C4": (10, 50, 1000),
    "C5": (1, 10, 200), "C6": (1, 50, 1000), "C7": (20, 10, 200), "C8": (20, 50, 1000),
}
TIMES = [0.0, 0.1, 0.35, 0.5, 1.0, 1.9, 3.0, 7.0]


def hausdorff(A, B):
    D = cdist(A, B)
    return max(D.min(axis=1).max(), D.min(axis=0).max())


# --- time model -----------------------------------------------------------

def test_time_at_examples():
    tm = TimeModel(10, 5, 100)
    assert time_at(12, tm) == pytest.approx(0.2)
    assert time_at(0, tm) == 0.0
    assert tm.time_at(0) == 0.0


def test_c1_has_twenty_increments():
    tm = ENV_CONFIGS["C1"]
    ts = [time_at(tau, tm) for tau in range(0, 101)]
    steps = np.diff(ts)
    assert np.count_nonzero(steps) == 20
    assert np.allclose(steps[steps > 0], 0.1)


@pytest.mark.parametrize("tau", [-1, 101])
def test_time_at_out_of_range(tau):
    with pytest.raises(ArgumentError):
        time_at(tau, ENV_CONFIGS["C1"])


def test_time_model_validation():
    with pytest.raises(ArgumentError):
        TimeModel(10, 3, 100)
    with pytest.raises(ArgumentError):
        TimeModel(0, 5, 100)


def test_env_configs_match_table():
    assert {k: (v.n_t, v.tau_t, v.tau_T) for k, v in ENV_CONFIGS.items()} == TABLE3


@pytest.mark.parametrize("cid", sorted(TABLE3))
def test_change_count_and_instants(cid):
    tm = ENV_CONFIGS[cid]
    ts = [tm.time_at(tau) for tau in range(tm.tau_T + 1)]
    jumps = [tau for tau in range(1, tm.tau_T + 1) if ts[tau] != ts[tau - 1]]
    assert len(jumps) == tm.changes == tm.tau_T // tm.tau_t
    assert all(j % tm.tau_t == 0 for j in jumps)
    assert tm.change_times() == [k / tm.n_t for k in range(tm.changes)]


@given(st.integers(0, 1000), st.integers(0, 1000))
def test_time_at_monotone(a, b):
    tm = ENV_CONFIGS["C8"]
    lo, hi = sorted((a, b))
    assert time_at(lo, tm) <= time_at(hi, tm)


# --- registry and evaluation ----------------------------------------------

def test_registry_matches_table():
    assert list(PROBLEM_NAMES) == list(TABLE2)
    for name, (n, m, typ) in TABLE2.items():
        p = get_problem(name)
        assert (p.name, p.n_var, p.n_obj, p.dmop_type.value) == (name, n, m, typ)
        assert np.all(np.isfinite(p.lower)) and np.all(p.lower < p.upper)


def test_unknown_problem():
    with pytest.raises(ArgumentError):
        get_problem("ZDT1")


def test_transform_constants():
    assert (pb.FLAT_B, pb.FLAT_C, pb.DECEPT_B, pb.DECEPT_C) == (0.001, 0.05, 0.001, 0.05)


@pytest.mark.parametrize("name", PROBLEM_NAMES)
def test_evaluate_contract(name):
    p = get_problem(name)
    X = sample_decision_space(p, 64, np.random.default_rng(0))
    for t in TIMES:
        F = p.evaluate(X, t)
        assert F.shape == (64, p.n_obj) and np.all(np.isfinite(F))
        assert np.array_equal(F, p.evaluate(X, t))
        assert np.array_equal(F[3], p.evaluate(X[3], t))


@pytest.mark.parametrize("name", PROBLEM_NAMES)
def test_evaluate_errors(name):
    p = get_problem(name)
    x = (p.lower + p.upper) / 2
    with pytest.raises(DomainError):
        p.evaluate(np.where(np.arange(p.n_var) == 0, p.upper + 0.1, x), 0.0)
    with pytest.raises(ArgumentError):
        p.evaluate(x[:-1], 0.0)
    with pytest.raises(ArgumentError):
        p.evaluate(x, -0.1)


@pytest.mark.parametrize("t", TIMES)
def test_fda4_optimum_on_unit_sphere(t):
    p = get_problem("FDA4")
    rng = np.random.default_rng(1)
    X = rng.random((20, 12))
    X[:, 2:] = abs(np.sin(0.5 * np.pi * t))
    F = p.evaluate(X, t)
    assert np.allclose(np.sum(F**2, axis=1), 1.0, atol=1e-9)


def test_dmop2_front_moves():
    p = get_problem("DMOP2")
    A, B = p.true_pof(0.0), p.true_pof(0.5)
    assert cdist(A, B).min(axis=1).max() > 1e-3


# --- true fronts ----------------------------------------------------------

@pytest.mark.parametrize("t", TIMES)
def test_fda4_front_is_unit_sphere(t):
    P = get_problem("FDA4").true_pof(t, 1000)
    assert np.allclose(np.linalg.norm(P, axis=1), 1.0, atol=1e-9)


@pytest.mark.parametrize("name", [n for n, v in TABLE2.items() if v[2] == "TypeI"])
def test_type_one_fronts_static(name):
    p = get_problem(name)
    ref = p.true_pof(0.0)
    for t in TIMES[1:]:
        assert hausdorff(ref, p.true_pof(t)) < 1e-6


@pytest.mark.parametrize("name", [n for n, v in TABLE2.items() if v[2] != "TypeI"])
def test_moving_fronts_change(name):
    p = get_problem(name)
    assert hausdorff(p.true_pof(0.0), p.true_pof(1.0)) > 1e-3


@pytest.mark.parametrize("name", PROBLEM_NAMES)
def test_true_pof_contract(name):
    p = get_problem(name)
    P = p.true_pof(0.3)
    assert np.array_equal(P, p.true_pof(0.3))
    assert P.shape[1] == p.n_obj and np.all(np.isfinite(P))
    assert len(p.true_pof(0.3, 40)) >= 2
    with pytest.raises(ArgumentError):
        p.true_pof(0.3, 1)


@pytest.mark.parametrize("name", PROBLEM_NAMES)
@pytest.mark.parametrize("t", [0.0, 0.5, 1.0, 1.9])
def test_random_points_never_dominate_front(name, t):
    # the sampled front is optimal: no feasible point may dominate any front sample
    p = get_problem(name)
    F = p.evaluate(sample_decision_space(p, 2000, np.random.default_rng(7)), t)
    P = p.true_pof(t)
    tol = 1e-9
    for f in F:
        dominated = np.all(f <= P + tol, axis=1) & np.any(f < P - tol, axis=1)
        assert not dominated.any()


def test_front_samples_mutually_nondominated():
    for name in PROBLEM_NAMES:
        P = get_problem(name).true_pof(0.7)
        better = np.all(P[:, None] <= P[None], axis=2) & np.any(P[:, None] < P[None], axis=2)
        assert not better.any(), name


def test_write_pof_csv(tmp_path):
    P = get_problem("HE7").true_pof(0.0, 10)
    path = tmp_path / "pof.csv"
    write_pof_csv(P, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "f1,f2"
    assert np.allclose(np.loadtxt(path, delimiter=",", skiprows=1), P)


# --- sampling -------------------------------------------------------------

def test_sample_decision_space_basic():
    p = get_problem("DIMP2")
    X = sample_decision_space(p, 5, np.random.default_rng(3))
    assert X.shape == (5, 10)
    assert np.all((X >= p.lower) & (X <= p.upper))
    assert np.array_equal(X, sample_decision_space(p, 5, np.random.default_rng(3)))


def test_sample_mean_law_of_large_numbers():
    p = get_problem("HE7")
    X = sample_decision_space(p, 100_000, np.random.default_rng(11))
    se = (p.upper - p.lower) / np.sqrt(12 * len(X))
    assert np.all(np.abs(X.mean(axis=0) - (p.lower + p.upper) / 2) < 3 * se)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(PROBLEM_NAMES), st.floats(0, 20), st.integers(0, 2**31))
def test_evaluate_pure_function(name, t, seed):
    p = get_problem(name)
    x = sample_decision_space(p, 1, np.random.default_rng(seed))[0]
    assert np.array_equal(p.evaluate(x, t), get_problem(name).evaluate(x.copy(), t))


def test_dmop_type_enum_values():
    assert {t.value for t in DmopType} == {"TypeI", "TypeII", "TypeIII"}
