import json

import numpy as np
import pytest

from gaussmmes import covariance as cov
from gaussmmes import potential as pot
from gaussmmes.pure_states import kappa_sampling_bound, params_to_cm, random_params


def test_chi_is_one_for_twin_beam():
    for N in (0.0, 0.5, 1.0, 5.0):
        assert pot.chi(cov.build_twin_beam(N), N) == pytest.approx(1.0, abs=1e-9)


def test_chi_is_one_for_ghz3():
    for N in (0.5, 1.0, 5.0):
        assert pot.chi(cov.build_ghz3(N), N) == pytest.approx(1.0, abs=1e-9)


def test_chi_is_one_for_vacuum():
    assert pot.chi(cov.build_thermal(4, 0), 0.0) == pytest.approx(1.0, abs=1e-12)


def test_delta_chi_vanishes_on_perfect_states():
    assert pot.delta_chi(cov.build_twin_beam(1), 1.0) == pytest.approx(0.0, abs=1e-9)
    assert pot.delta_chi(cov.build_ghz3(1), 1.0) == pytest.approx(0.0, abs=1e-9)
    assert pot.delta_chi(cov.build_thermal(4, 0), 0.0) == pytest.approx(0.0, abs=1e-9)


def test_rejects_mixed_states():
    with pytest.raises(ValueError):
        pot.chi(cov.build_thermal(2, 1), 1.0)
    with pytest.raises(ValueError):
        pot.delta_chi(cov.build_thermal(2, 1), 1.0)


def test_rejects_negative_bound():
    with pytest.raises(ValueError):
        pot.chi(cov.build_twin_beam(1), -0.5)


def test_report_consistency():
    rng = np.random.default_rng(7)
    V = params_to_cm(random_params(4, rng, kappa_sampling_bound(1.0)))
    rep = pot.report(V, 1.0)
    values = np.array([v for _, v in rep.per_partition])
    assert rep.chi == pytest.approx(values.mean(), abs=1e-12)
    assert rep.delta_chi**2 == pytest.approx(values.var(), abs=1e-10)
    assert len(rep.per_partition) == 6
    assert [p.modes for p, _ in rep.per_partition] == [
        (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4),
    ]


def test_report_on_constructors():
    rep = pot.report(cov.build_twin_beam(1), 1.0)
    assert [v for _, v in rep.per_partition] == pytest.approx([1.0, 1.0], abs=1e-12)
    rep3 = pot.report(cov.build_ghz3(1), 1.0)
    assert [v for _, v in rep3.per_partition] == pytest.approx([1.0] * 3, abs=1e-9)


def test_chi_lower_bound_on_energy_constrained_states():
    # any pure state is feasible for the bound its own worst mode saturates,
    # and its normalized purities must then all be >= 1
    rng = np.random.default_rng(11)
    count = 0
    for n in (2, 3, 4, 5):
        for _ in range(250):
            V = params_to_cm(random_params(n, rng, kappa_sampling_bound(1.0)))
            N = cov.mode_energies(V).max() - 0.5
            rep = pot.report(V, N)
            assert rep.chi >= 1.0 - 1e-9
            assert all(v >= 1.0 - 1e-9 for _, v in rep.per_partition)
            count += 1
    assert count == 1000


def test_complement_symmetry_even_n():
    rng = np.random.default_rng(13)
    for _ in range(25):
        V = params_to_cm(random_params(4, rng, kappa_sampling_bound(1.0)))
        rep = pot.report(V, 1.0)
        values = {p.modes: v for p, v in rep.per_partition}
        for p, v in rep.per_partition:
            assert v == pytest.approx(values[p.complement.modes], abs=1e-9)


def test_ordering_invariance():
    rng = np.random.default_rng(17)
    for _ in range(25):
        V = params_to_cm(random_params(3, rng, kappa_sampling_bound(1.0)))
        W = cov.reorder(V, cov.Ordering.BLOCKED)
        assert pot.chi(W, 1.0) == pytest.approx(pot.chi(V, 1.0), abs=1e-12)
        assert pot.delta_chi(W, 1.0) == pytest.approx(pot.delta_chi(V, 1.0), abs=1e-12)


def test_delta_zero_iff_values_equal():
    rng = np.random.default_rng(19)
    for _ in range(50):
        V = params_to_cm(random_params(4, rng, kappa_sampling_bound(1.0)))
        rep = pot.report(V, 1.0)
        values = np.array([v for _, v in rep.per_partition])
        spread = values.max() - values.min()
        if rep.delta_chi == 0.0:
            assert spread <= 1e-9
        if spread > 1e-6:
            assert rep.delta_chi > 0.0


def test_report_json():
    rep = pot.report(cov.build_ghz3(1), 1.0)
    data = json.loads(rep.to_json())
    assert data["N"] == 1.0
    assert data["per_partition"][0]["modes"] == [1]
    assert data["chi"] == pytest.approx(1.0, abs=1e-9)
