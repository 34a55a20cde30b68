import json

import numpy as np
import pytest

from gaussmmes import covariance as cov
from gaussmmes.oracle import sample_random_physical_cm
from gaussmmes.pure_states import kappa_sampling_bound, params_to_cm, random_params


def test_thermal_examples():
    assert np.array_equal(cov.build_thermal(1, 1).entries, 1.5 * np.eye(2))
    assert np.array_equal(cov.build_thermal(2, 0).entries, 0.5 * np.eye(4))
    assert np.array_equal(cov.build_thermal(3, 2.5).entries, 3.0 * np.eye(6))


def test_thermal_rejects_bad_arguments():
    with pytest.raises(ValueError):
        cov.build_thermal(0, 1)
    with pytest.raises(ValueError):
        cov.build_thermal(1, -0.1)


def test_twin_beam_vacuum_limit():
    assert np.allclose(cov.build_twin_beam(0).entries, 0.5 * np.eye(4), atol=1e-15)


def test_twin_beam_structure_and_purity():
    V = cov.build_twin_beam(1)
    c, s = 3.0, 2.0 * np.sqrt(2.0)
    assert V.entries[0, 0] == pytest.approx(c / 2)
    assert V.entries[0, 2] == pytest.approx(s / 2)
    assert V.entries[1, 3] == pytest.approx(-s / 2)
    # purity condition det V = (1/2)^(2n)
    assert np.linalg.det(V.entries) == pytest.approx(1 / 16, rel=1e-12)
    assert cov.purity(V) == pytest.approx(1.0, abs=1e-12)


def test_twin_beam_reductions_are_thermal():
    V = cov.build_twin_beam(1)
    for k in (1, 2):
        assert np.allclose(cov.reduce(V, [k]).entries, 1.5 * np.eye(2), atol=1e-12)


def test_ghz3_offdiagonal_values():
    V = cov.build_ghz3(1)
    v_plus = (1 + np.sqrt(10)) / 3
    v_minus = (1 - np.sqrt(10)) / 3
    for i in range(3):
        for j in range(3):
            block = V.entries[2 * i : 2 * i + 2, 2 * j : 2 * j + 2]
            if i == j:
                assert np.allclose(block, 1.5 * np.eye(2), atol=1e-14)
            else:
                assert np.allclose(block, np.diag([v_plus, v_minus]), atol=1e-14)


def test_ghz3_is_pure_by_determinant():
    # independent numeric determinant, cross-checked against the purity condition
    det = np.linalg.det(cov.build_ghz3(1).entries)
    assert abs(det - 0.5**6) <= 1e-10


def test_ghz3_vacuum_limit():
    assert np.array_equal(cov.build_ghz3(0).entries, 0.5 * np.eye(6))


def test_reorder_scalar_fixed_point():
    V = cov.build_thermal(1, 1)
    W = cov.reorder(V, cov.Ordering.BLOCKED)
    assert W.ordering is cov.Ordering.BLOCKED
    assert np.array_equal(W.entries, V.entries)


def test_reorder_involution_exact():
    V = cov.build_twin_beam(1)
    back = cov.reorder(cov.reorder(V, cov.Ordering.BLOCKED), cov.Ordering.INTERLEAVED)
    assert np.array_equal(back.entries, V.entries)


def test_reorder_preserves_spectrum_on_random_cms():
    for V in sample_random_physical_cm(3, 1.0, seed=5, count=100):
        W = cov.reorder(V, cov.Ordering.BLOCKED)
        assert np.linalg.det(W.entries) == pytest.approx(np.linalg.det(V.entries), rel=1e-12)
        assert np.trace(W.entries) == pytest.approx(np.trace(V.entries), rel=1e-12)
        assert np.allclose(
            np.linalg.eigvalsh(W.entries), np.linalg.eigvalsh(V.entries), rtol=1e-12, atol=1e-12
        )


def test_purity_closed_form_for_thermal_states():
    for n in range(1, 8):
        for N in (0.0, 0.5, 1.0, 2.5, 7.0, 20.0):
            V = cov.build_thermal(n, N)
            expected = 1.0 / (2.0 * (N + 0.5)) ** n
            assert cov.purity(V) == pytest.approx(expected, rel=1e-12)


def test_purity_rejects_nonpositive_matrix():
    V = cov.CovarianceMatrix(1, cov.Ordering.INTERLEAVED, np.diag([1.0, -0.5]))
    with pytest.raises(ValueError):
        cov.purity(V)


def test_schmidt_symmetry_of_pure_reductions():
    # purity(reduce(V, A)) == purity(reduce(V, complement)) for pure V
    rng = np.random.default_rng(42)
    for n in (2, 3, 4, 5):
        for _ in range(20):
            V = params_to_cm(random_params(n, rng, kappa_sampling_bound(1.0)))
            for size in range(1, n // 2 + 1):
                A = list(range(1, size + 1))
                B = list(range(size + 1, n + 1))
                pa = cov.purity(cov.reduce(V, A))
                pb = cov.purity(cov.reduce(V, B))
                assert pa == pytest.approx(pb, abs=1e-9)


def test_is_pure_examples():
    assert cov.is_pure(cov.build_twin_beam(2), 1e-9)
    assert not cov.is_pure(cov.build_thermal(2, 1), 1e-9)
    assert cov.is_pure(cov.build_ghz3(1), 1e-9)


def test_reduce_examples():
    assert np.allclose(cov.reduce(cov.build_thermal(3, 2), [1, 2]).entries, 2.5 * np.eye(4))
    sub = cov.reduce(cov.build_ghz3(1), [2, 3])
    v_plus = (1 + np.sqrt(10)) / 3
    v_minus = (1 - np.sqrt(10)) / 3
    assert np.allclose(sub.entries[:2, :2], 1.5 * np.eye(2))
    assert np.allclose(sub.entries[:2, 2:], np.diag([v_plus, v_minus]))


def test_reduce_rejects_bad_modes():
    V = cov.build_thermal(2, 1)
    with pytest.raises(ValueError):
        cov.reduce(V, [3])
    with pytest.raises(ValueError):
        cov.reduce(V, [])


def test_reduce_accepts_blocked_input():
    V = cov.reorder(cov.build_twin_beam(1), cov.Ordering.BLOCKED)
    sub = cov.reduce(V, [1])
    assert np.allclose(sub.entries, 1.5 * np.eye(2), atol=1e-12)


def test_mode_energy():
    V = cov.build_thermal(3, 2)
    for k in (1, 2, 3):
        assert cov.mode_energy(V, k) == pytest.approx(2.5)
    tb = cov.build_twin_beam(0.75)
    for k in (1, 2):
        assert cov.mode_energy(tb, k) == pytest.approx(1.25, abs=1e-12)
    vac = cov.build_thermal(2, 0)
    assert cov.mode_energy(vac, 1) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        cov.mode_energy(vac, 3)


def test_mode_energies_match_both_orderings():
    V = cov.build_twin_beam(1)
    W = cov.reorder(V, cov.Ordering.BLOCKED)
    assert np.allclose(cov.mode_energies(V), cov.mode_energies(W))
    assert cov.mode_energies(V)[0] == pytest.approx(cov.mode_energy(V, 1))


def test_is_physical():
    assert cov.is_physical(cov.build_thermal(2, 1), 1e-9)
    below_vacuum = cov.CovarianceMatrix(1, cov.Ordering.INTERLEAVED, 0.1 * np.eye(2))
    assert not cov.is_physical(below_vacuum, 1e-9)


def test_chart_states_are_physical():
    rng = np.random.default_rng(3)
    for _ in range(100):
        V = params_to_cm(random_params(4, rng, kappa_sampling_bound(1.0)))
        assert cov.is_physical(V, 1e-10)


def test_constructor_energy_saturation():
    for N in (0.5, 1.0, 5.0):
        for V in (cov.build_twin_beam(N), cov.build_ghz3(N)):
            assert np.allclose(cov.mode_energies(V), N + 0.5, atol=1e-12)
            assert cov.is_pure(V, 1e-9)
            assert cov.is_physical(V, 1e-9)
            for k in range(1, V.n + 1):
                assert np.allclose(
                    cov.reduce(V, [k]).entries, (N + 0.5) * np.eye(2), atol=1e-12
                )


def test_symmetry_validation():
    bad = 0.5 * np.eye(4)
    bad[0, 1] = 1e-6
    with pytest.raises(ValueError):
        cov.CovarianceMatrix(2, cov.Ordering.INTERLEAVED, bad)


def test_symplectic_form_properties():
    for n in (1, 2, 4):
        for ordering in cov.Ordering:
            omega = cov.symplectic_form(n, ordering)
            assert np.array_equal(omega.T, -omega)
            assert np.allclose(omega @ omega, -np.eye(2 * n))


def test_json_round_trip_is_exact():
    rng = np.random.default_rng(9)
    V = params_to_cm(random_params(3, rng, 1.5))
    back = cov.cm_from_json(cov.cm_to_json(V))
    assert back == V
    data = json.loads(cov.cm_to_json(V))
    assert data["ordering"] == "interleaved"
    assert len(data["entries"]) == 6
