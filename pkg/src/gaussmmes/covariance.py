"""Covariance-matrix model for zero-mean Gaussian states of n bosonic modes.

Dimensionless canonical variables, unit frequency, hbar = 1, so the vacuum
covariance matrix is I/2.  All first moments are fixed to zero: displacing a
state only spends energy budget without changing any entanglement quantity,
so the covariance matrix is the complete state description here.

Two index orderings are supported.  ``Ordering.INTERLEAVED`` is
(q1, p1, ..., qn, pn) and is the canonical ordering everywhere in this
package; ``Ordering.BLOCKED`` is (q1..qn, p1..pn) and appears only at the
pure-state parametrization boundary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

import numpy as np

__all__ = [
    "Ordering",
    "CovarianceMatrix",
    "symplectic_form",
    "build_thermal",
    "build_twin_beam",
    "build_ghz3",
    "reorder",
    "purity",
    "is_pure",
    "reduce",
    "mode_energy",
    "mode_energies",
    "is_physical",
    "cm_to_json",
    "cm_from_json",
]

SYMMETRY_RTOL = 1e-12


class Ordering(str, Enum):
    """Index convention of a 2n x 2n covariance matrix."""

    INTERLEAVED = "interleaved"  # (q1, p1, q2, p2, ..., qn, pn)
    BLOCKED = "blocked"          # (q1, ..., qn, p1, ..., pn)


@dataclass(frozen=True)
class CovarianceMatrix:
    """Second moments of the canonical operators of an n-mode Gaussian state.

    Parameters
    ----------
    n : int
        Number of bosonic modes.
    ordering : Ordering
        Index convention of `entries`.
    entries : ndarray
        Real symmetric 2n x 2n matrix.  Stored read-only.

    Raises
    ------
    ValueError
        If the matrix has the wrong shape, non-finite entries, or is
        asymmetric beyond ``|V_lm - V_ml| <= 1e-12 * max(1, |V_lm|)``.
    """

    n: int
    ordering: Ordering
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"mode count must be positive, got {self.n}")
        entries = np.array(self.entries, dtype=float, copy=True)
        if entries.shape != (2 * self.n, 2 * self.n):
            raise ValueError(
                f"expected a {2 * self.n}x{2 * self.n} matrix, got {entries.shape}"
            )
        if not np.all(np.isfinite(entries)):
            raise ValueError("covariance matrix entries must be finite")
        asym = np.abs(entries - entries.T)
        if np.any(asym > SYMMETRY_RTOL * np.maximum(1.0, np.abs(entries))):
            raise ValueError("covariance matrix is not symmetric within tolerance")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "ordering", Ordering(self.ordering))

    def __eq__(self, other):
        if not isinstance(other, CovarianceMatrix):
            return NotImplemented
        return (
            self.n == other.n
            and self.ordering == other.ordering
            and np.array_equal(self.entries, other.entries)
        )


def symplectic_form(n: int, ordering: Ordering = Ordering.INTERLEAVED) -> np.ndarray:
    """Antisymmetric form Omega encoding the canonical commutation relations.

    Interleaved: direct sum of n blocks [[0, 1], [-1, 0]].
    Blocked: [[0, I_n], [-I_n, 0]].
    """
    if n < 1:
        raise ValueError(f"mode count must be positive, got {n}")
    omega = np.zeros((2 * n, 2 * n))
    if Ordering(ordering) is Ordering.INTERLEAVED:
        for k in range(n):
            omega[2 * k, 2 * k + 1] = 1.0
            omega[2 * k + 1, 2 * k] = -1.0
    else:
        omega[:n, n:] = np.eye(n)
        omega[n:, :n] = -np.eye(n)
    return omega


# --- constructors ---


def build_thermal(n: int, N: float) -> CovarianceMatrix:
    """Thermal state of n modes with N mean excitations per mode: (N + 1/2) I."""
    if n < 1:
        raise ValueError(f"mode count must be positive, got {n}")
    if N < 0:
        raise ValueError(f"mean excitation number must be nonnegative, got {N}")
    return CovarianceMatrix(n, Ordering.INTERLEAVED, (N + 0.5) * np.eye(2 * n))


def build_twin_beam(N: float) -> CovarianceMatrix:
    """Two-mode squeezed (twin-beam) state saturating the per-mode energy bound.

    The squeezing is fixed by cosh r = 2N + 1, which makes both single-mode
    reductions thermal with N excitations.  The global state is pure.
    """
    if N < 0:
        raise ValueError(f"mean excitation number must be nonnegative, got {N}")
    c = 2.0 * N + 1.0
    s = np.sqrt(c * c - 1.0)
    entries = 0.5 * np.array(
        [
            [c, 0.0, s, 0.0],
            [0.0, c, 0.0, -s],
            [s, 0.0, c, 0.0],
            [0.0, -s, 0.0, c],
        ]
    )
    return CovarianceMatrix(2, Ordering.INTERLEAVED, entries)


def build_ghz3(N: float) -> CovarianceMatrix:
    """Symmetric three-mode pure state whose single-mode reductions are thermal.

    Diagonal blocks are (N + 1/2) I_2; every off-diagonal block is
    diag(v+, v-) with

        v± = N(N+1)/(4N+2) * [1 ± sqrt(1 + (4N+2)^2 / (2N(N+1)))].

    The v± expression is singular at N = 0; the value there is defined by the
    vacuum limit I/2, which is also the only state the N = 0 energy bound
    admits.
    """
    if N < 0:
        raise ValueError(f"mean excitation number must be nonnegative, got {N}")
    if N == 0:
        return CovarianceMatrix(3, Ordering.INTERLEAVED, 0.5 * np.eye(6))
    a = N * (N + 1.0) / (4.0 * N + 2.0)
    root = np.sqrt(1.0 + (4.0 * N + 2.0) ** 2 / (2.0 * N * (N + 1.0)))
    v_plus = a * (1.0 + root)
    v_minus = a * (1.0 - root)
    entries = (N + 0.5) * np.eye(6)
    off = np.diag([v_plus, v_minus])
    for i in range(3):
        for j in range(3):
            if i != j:
                entries[2 * i : 2 * i + 2, 2 * j : 2 * j + 2] = off
    return CovarianceMatrix(3, Ordering.INTERLEAVED, entries)


# --- ordering conversion ---


def _blocked_to_interleaved_perm(n: int) -> np.ndarray:
    # position 2i holds q_i (blocked index i), position 2i+1 holds p_i (blocked n+i)
    perm = np.empty(2 * n, dtype=np.intp)
    perm[0::2] = np.arange(n)
    perm[1::2] = np.arange(n) + n
    return perm


def reorder(V: CovarianceMatrix, target: Ordering) -> CovarianceMatrix:
    """Permutation-similarity transform between the two index orderings.

    Involutive and spectrum-preserving; returns the input unchanged when it
    already has the target ordering.
    """
    target = Ordering(target)
    if V.ordering is target:
        return V
    perm = _blocked_to_interleaved_perm(V.n)
    if target is Ordering.BLOCKED:
        perm = np.argsort(perm)
    entries = V.entries[np.ix_(perm, perm)]
    return CovarianceMatrix(V.n, target, entries)


# --- predicates and scalar diagnostics ---


def purity(V: CovarianceMatrix) -> float:
    """tr(rho^2) of the Gaussian state: 1 / (2^n sqrt(det V)).

    Raises
    ------
    ValueError
        If V is not positive definite (no Gaussian state has such a CM).
    """
    try:
        chol = np.linalg.cholesky(V.entries)
    except np.linalg.LinAlgError as exc:
        raise ValueError("covariance matrix must be positive definite") from exc
    logdet = 2.0 * np.sum(np.log(chol.diagonal()))
    return float(np.exp(-V.n * np.log(2.0) - 0.5 * logdet))


def is_pure(V: CovarianceMatrix, tol: float = 1e-9) -> bool:
    """True iff det V equals (1/2)^(2n) within relative tolerance `tol`."""
    target = 0.25**V.n
    return bool(abs(np.linalg.det(V.entries) - target) <= tol * target)


def reduce(V: CovarianceMatrix, A: Iterable[int]) -> CovarianceMatrix:
    """Covariance matrix of the reduced state on the modes in A (1-based).

    Tracing out the complement of A keeps exactly the rows and columns of the
    modes in A; the result is returned in interleaved ordering.
    """
    modes = getattr(A, "modes", A)
    modes = sorted(set(int(k) for k in modes))
    if not modes:
        raise ValueError("mode subset must be nonempty")
    if modes[0] < 1 or modes[-1] > V.n:
        raise ValueError(f"mode indices must lie in 1..{V.n}, got {modes}")
    Vi = reorder(V, Ordering.INTERLEAVED)
    rows = np.array([r for k in modes for r in (2 * k - 2, 2 * k - 1)], dtype=np.intp)
    return CovarianceMatrix(len(modes), Ordering.INTERLEAVED, Vi.entries[np.ix_(rows, rows)])


def mode_energy(V: CovarianceMatrix, k: int) -> float:
    """Mean excitations plus zero-point energy of mode k: (<q_k^2> + <p_k^2>)/2."""
    if not 1 <= k <= V.n:
        raise ValueError(f"mode index must lie in 1..{V.n}, got {k}")
    d = V.entries.diagonal()
    if V.ordering is Ordering.INTERLEAVED:
        return 0.5 * (d[2 * k - 2] + d[2 * k - 1])
    return 0.5 * (d[k - 1] + d[V.n + k - 1])


def mode_energies(V: CovarianceMatrix) -> np.ndarray:
    """Per-mode energies as an array of length n."""
    d = V.entries.diagonal()
    if V.ordering is Ordering.INTERLEAVED:
        return 0.5 * (d[0::2] + d[1::2])
    return 0.5 * (d[: V.n] + d[V.n :])


def is_physical(V: CovarianceMatrix, tol: float = 1e-10) -> bool:
    """Bona fide test: V + (i/2) Omega has no eigenvalue below -tol.

    This is the uncertainty-principle constraint a covariance matrix must
    satisfy to describe a quantum state.
    """
    omega = symplectic_form(V.n, V.ordering)
    herm = V.entries + 0.5j * omega
    return bool(np.linalg.eigvalsh(herm).min() >= -tol)


# --- serialization ---


def cm_to_json(V: CovarianceMatrix) -> str:
    """JSON encoding {n, ordering, entries} with exact float round-trip."""
    return json.dumps(
        {"n": V.n, "ordering": V.ordering.value, "entries": V.entries.tolist()}
    )


def cm_from_json(text: str) -> CovarianceMatrix:
    data = json.loads(text)
    return CovarianceMatrix(
        int(data["n"]), Ordering(data["ordering"]), np.array(data["entries"], dtype=float)
    )
