"""Normalized multipartite-entanglement potential of pure Gaussian states.

For a pure n-mode state with covariance matrix V and per-mode excitation
bound N, every balanced subset A contributes the normalized reduced purity

    (N + 1/2)^{n_A} * det(V_A)^{-1/2},      n_A = [n/2],

which is >= 1 whenever the state respects the energy bound (the thermal
state minimizes reduced purity at fixed energy).  chi is the mean of these
values over all balanced subsets, delta_chi their population standard
deviation.  chi = 1 characterizes a perfect MMES; the amount by which the
constrained minimum of chi exceeds 1 measures entanglement frustration.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import covariance as cov
from .bipartitions import Bipartition, balanced_bipartitions, balanced_row_indices

__all__ = ["EntanglementReport", "chi", "delta_chi", "report"]

PURITY_GATE_RTOL = 1e-6
RADICAND_CLAMP = 1e-12


@dataclass(frozen=True)
class EntanglementReport:
    """chi, delta_chi, and the per-bipartition normalized purities of one state."""

    chi: float
    delta_chi: float
    per_partition: tuple[tuple[Bipartition, float], ...]
    N: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "chi": self.chi,
                "delta_chi": self.delta_chi,
                "N": self.N,
                "per_partition": [
                    {"modes": list(p.modes), "value": v} for p, v in self.per_partition
                ],
            }
        )


def _gate_pure(V: cov.CovarianceMatrix) -> np.ndarray:
    """Reject mixed inputs; return interleaved entries."""
    if not cov.is_pure(V, PURITY_GATE_RTOL):
        raise ValueError(
            "entanglement potential is defined for pure global states only "
            "(det V must equal (1/2)^(2n) within 1e-6 relative)"
        )
    return cov.reorder(V, cov.Ordering.INTERLEAVED).entries


def normalized_purities(entries: np.ndarray, n: int, N: float) -> np.ndarray:
    """Normalized reduced purity of every balanced subset, in enumeration order.

    Operates on raw interleaved entries; no purity gate.  This is the hot path
    shared by chi/delta_chi/report and the optimizer objective.
    """
    rows = balanced_row_indices(n)
    sub = entries[rows[:, :, None], rows[:, None, :]]
    dets = np.linalg.det(sub)
    n_a = n // 2
    return (N + 0.5) ** n_a / np.sqrt(dets)


def _delta_from_values(values: np.ndarray) -> float:
    # population variance over bipartitions, in the normalized-purity scale
    radicand = float(np.mean(values**2) - np.mean(values) ** 2)
    if radicand < 0:
        if radicand < -RADICAND_CLAMP:
            raise ArithmeticError(
                f"variance radicand {radicand} below the rounding clamp"
            )
        radicand = 0.0
    return float(np.sqrt(radicand))


def chi(V: cov.CovarianceMatrix, N: float) -> float:
    """Mean normalized reduced purity over all balanced bipartitions.

    Parameters
    ----------
    V : CovarianceMatrix
        Pure physical covariance matrix (purity gate at 1e-6 relative on det).
    N : float
        Excitation bound used for normalization, N >= 0.

    Returns
    -------
    float
        chi >= 1 for any state satisfying the per-mode energy bound.
    """
    if N < 0:
        raise ValueError(f"excitation bound must be nonnegative, got {N}")
    entries = _gate_pure(V)
    return float(np.mean(normalized_purities(entries, V.n, N)))


def delta_chi(V: cov.CovarianceMatrix, N: float) -> float:
    """Population standard deviation of the normalized reduced purities.

    Zero iff every balanced bipartition attains the same purity (a uniformly
    optimal state).  Tiny negative radicands from rounding (>= -1e-12) are
    clamped to zero.
    """
    if N < 0:
        raise ValueError(f"excitation bound must be nonnegative, got {N}")
    entries = _gate_pure(V)
    return _delta_from_values(normalized_purities(entries, V.n, N))


def report(V: cov.CovarianceMatrix, N: float) -> EntanglementReport:
    """Full per-bipartition diagnostic: chi, delta_chi, and each subset's value."""
    if N < 0:
        raise ValueError(f"excitation bound must be nonnegative, got {N}")
    entries = _gate_pure(V)
    values = normalized_purities(entries, V.n, N)
    parts = balanced_bipartitions(V.n)
    return EntanglementReport(
        chi=float(np.mean(values)),
        delta_chi=_delta_from_values(values),
        per_partition=tuple(zip(parts, (float(v) for v in values))),
        N=N,
    )
