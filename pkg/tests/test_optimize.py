import json

import numpy as np
import pytest

from gaussmmes import covariance as cov
from gaussmmes import optimize as opt
from gaussmmes.potential import chi as chi_of
from gaussmmes.pure_states import ConstraintMode, params_to_cm


def small_config(n, restarts=4, seed=7, **kw):
    return opt.ExperimentConfig(n=n, restarts=restarts, seed=seed, **kw)


def test_config_validation():
    with pytest.raises(ValueError):
        opt.ExperimentConfig(n=1)
    with pytest.raises(ValueError):
        opt.ExperimentConfig(n=2, N_grid=())
    with pytest.raises(ValueError):
        opt.ExperimentConfig(n=2, N_grid=(1.0, 0.5))
    with pytest.raises(ValueError):
        opt.ExperimentConfig(n=2, N_grid=(-1.0,))
    with pytest.raises(ValueError):
        opt.ExperimentConfig(n=2, restarts=0)
    with pytest.raises(ValueError):
        opt.ExperimentConfig(n=2, tol=0.0)
    with pytest.raises(ValueError):
        opt.ExperimentConfig(n=2, penalty_schedule=())
    with pytest.raises(ValueError):
        opt.ExperimentConfig(n=2, threads=0)
    with pytest.raises(ValueError):
        opt.ExperimentConfig(n=2, constraint_mode="sideways")


def test_two_modes_reaches_perfect_state():
    result = opt.minimize_chi(small_config(2), 1.0)
    assert result.feasible
    assert result.best_chi == pytest.approx(1.0, abs=1e-4)
    V = params_to_cm(result.best_params)
    assert cov.mode_energies(V).max() <= 1.5 + 1e-6
    # reported chi matches an independent evaluation of the returned state
    assert chi_of(V, 1.0) == pytest.approx(result.best_chi, abs=1e-10)


def test_vacuum_bound_forces_chi_one():
    result = opt.minimize_chi(small_config(2), 0.0)
    assert result.feasible
    assert result.best_chi == pytest.approx(1.0, abs=1e-4)
    assert cov.mode_energies(params_to_cm(result.best_params)).max() <= 0.5 + 1e-6


def test_results_are_deterministic_and_thread_invariant():
    cfg1 = small_config(3, restarts=4, seed=11)
    cfg4 = small_config(3, restarts=4, seed=11, threads=4)
    a = opt.minimize_chi(cfg1, 1.0)
    b = opt.minimize_chi(cfg1, 1.0)
    c = opt.minimize_chi(cfg4, 1.0)
    for other in (b, c):
        assert other.best_chi == a.best_chi
        assert other.best_delta_chi == a.best_delta_chi
        assert np.array_equal(other.best_params.as_vector(), a.best_params.as_vector())
        assert opt.scan_csv_lines([other]) == opt.scan_csv_lines([a])


def test_seed_changes_restart_draws():
    a = opt.minimize_chi(small_config(2, restarts=2, seed=1), 1.0)
    b = opt.minimize_chi(small_config(2, restarts=2, seed=2), 1.0)
    assert not np.array_equal(a.best_params.as_vector(), b.best_params.as_vector())


def test_feasibility_invariants_of_reported_optimum():
    result = opt.minimize_chi(small_config(3, restarts=6), 1.0)
    assert result.feasible
    V = params_to_cm(result.best_params)
    assert cov.mode_energies(V).max() <= 1.5 + 1e-6
    assert cov.is_pure(V, 1e-10)
    assert result.min_feasible_iterate_chi >= 1.0 - 1e-6


def test_average_constraint_mode():
    cfg = small_config(2, restarts=4, constraint_mode=ConstraintMode.AVERAGE)
    result = opt.minimize_chi(cfg, 1.0)
    assert result.feasible
    V = params_to_cm(result.best_params)
    assert cov.mode_energies(V).mean() <= 1.5 + 1e-6
    # the average constraint admits every per-mode-feasible state, so the
    # optimum cannot be worse than a perfect state
    assert result.best_chi <= 1.0 + 1e-4


def test_scan_rows_and_warm_start():
    cfg = opt.ExperimentConfig(n=2, N_grid=(0.0, 0.5, 1.0), restarts=3, seed=5)
    results = opt.scan(cfg)
    assert [r.N for r in results] == [0.0, 0.5, 1.0]
    assert all(r.feasible for r in results)
    lines = opt.scan_csv_lines(results)
    assert lines[0] == opt.CSV_HEADER
    assert len(lines) == 4
    assert lines[1].startswith("2,0.0,")
    # n=2 is frustration-free: every grid point reaches chi = 1
    for r in results:
        assert r.best_chi == pytest.approx(1.0, abs=1e-4)


def test_scan_is_reproducible():
    cfg = opt.ExperimentConfig(n=2, N_grid=(0.5, 1.0), restarts=3, seed=9)
    a = opt.scan(cfg)
    b = opt.scan(cfg)
    assert opt.scan_csv_lines(a) == opt.scan_csv_lines(b)
    assert opt.results_to_jsonl(a) == opt.results_to_jsonl(b)


def test_delta_phase_trivial_for_two_modes():
    cfg = small_config(2, restarts=3)
    base = opt.minimize_chi(cfg, 1.0)
    second = opt.minimize_delta_chi_at_chi_min(cfg, 1.0, base=base)
    assert second.feasible
    assert second.best_chi <= base.best_chi + 1e-4
    # both bipartition subsets of a pure 2-mode state have equal purity
    assert second.best_delta_chi <= 1e-6


def test_traces_cover_all_restarts():
    cfg = small_config(2, restarts=5)
    result = opt.minimize_chi(cfg, 1.0, warm_params=None)
    assert [t.index for t in result.traces] == list(range(5))
    warm = opt.minimize_chi(cfg, 1.0, warm_params=result.best_params)
    assert [t.index for t in warm.traces] == [-1, 0, 1, 2, 3, 4]
    assert all(t.evaluations > 0 for t in result.traces)


def test_jsonl_record_shape():
    result = opt.minimize_chi(small_config(2, restarts=2), 0.5)
    record = json.loads(opt.results_to_jsonl([result]).splitlines()[0])
    assert record["n"] == 2
    assert record["N"] == 0.5
    assert record["feasible"] is True
    assert "wall_time" not in record
    assert len(record["best_params"]["kappa"]) == 2
    assert len(record["best_params"]["h"]) == 4
    assert record["traces"][0]["evaluations"] > 0


def test_csv_floats_round_trip():
    result = opt.minimize_chi(small_config(2, restarts=2), 1.0)
    line = opt.scan_csv_lines([result])[1]
    fields = line.split(",")
    assert float(fields[2]) == result.best_chi
    assert float(fields[3]) == result.best_delta_chi
