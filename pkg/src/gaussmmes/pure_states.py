"""Smooth unconstrained parametrization of all zero-mean pure Gaussian states.

Every pure n-mode covariance matrix can be written, in blocked ordering, as

    V~ = 1/2 R T^2 R^T,   T = diag(K, K^-1),   R = [[X, Y], [-Y, X]],

with K a nonsingular diagonal matrix and U = X + iY unitary.  The chart used
here maps any finite real vector to such a state: K = exp(diag(kappa)) is
automatically nonsingular, and U = exp(iH) with H Hermitian is automatically
unitary.  Purity is exact by construction (det T^2 = 1, R orthogonal), which
lets an optimizer roam an unconstrained parameter space while only the energy
bound needs a penalty.

Packing of the n^2 real numbers in `h`: the first n entries are the diagonal
of H; the remaining n(n-1)/2 pairs are (real, imag) of the upper-triangle
entries H[i, j], i < j, in row-major order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import covariance as cov

__all__ = [
    "PureStateParams",
    "ConstraintMode",
    "unitary_from_generator",
    "hermitian_from_packed",
    "pack_hermitian",
    "params_to_cm",
    "pure_cm_entries",
    "constraint_excess",
    "kappa_sampling_bound",
    "random_params",
]


class ConstraintMode(str, Enum):
    """Which form of the energy bound a state must satisfy."""

    PER_MODE = "per-mode"  # every mode's energy <= N + 1/2
    AVERAGE = "average"    # mean energy per mode <= N + 1/2


@dataclass(frozen=True)
class PureStateParams:
    """Parameter vector of one pure Gaussian state.

    kappa has length n (squeezing exponents); h has length n^2 (Hermitian
    generator of the unitary, packed as documented in the module docstring).
    Any finite values are valid.
    """

    n: int
    kappa: np.ndarray = field(repr=False)
    h: np.ndarray = field(repr=False)

    def __post_init__(self):
        kappa = np.array(self.kappa, dtype=float, copy=True)
        h = np.array(self.h, dtype=float, copy=True)
        if self.n < 1:
            raise ValueError(f"mode count must be positive, got {self.n}")
        if kappa.shape != (self.n,):
            raise ValueError(f"kappa must have shape ({self.n},), got {kappa.shape}")
        if h.shape != (self.n**2,):
            raise ValueError(f"h must have shape ({self.n ** 2},), got {h.shape}")
        if not (np.all(np.isfinite(kappa)) and np.all(np.isfinite(h))):
            raise ValueError("parameters must be finite")
        kappa.setflags(write=False)
        h.setflags(write=False)
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "h", h)

    def as_vector(self) -> np.ndarray:
        """Flat parameter vector (kappa then h), the optimizer's coordinates."""
        return np.concatenate([self.kappa, self.h])

    @classmethod
    def from_vector(cls, n: int, vec: np.ndarray) -> "PureStateParams":
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (n + n**2,):
            raise ValueError(f"expected {n + n ** 2} parameters, got {vec.shape}")
        return cls(n, vec[:n], vec[n:])

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "kappa": self.kappa.tolist(), "h": self.h.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "PureStateParams":
        data = json.loads(text)
        return cls(int(data["n"]), np.array(data["kappa"]), np.array(data["h"]))


def hermitian_from_packed(h: np.ndarray) -> np.ndarray:
    """Unpack n^2 reals into the Hermitian generator H."""
    h = np.asarray(h, dtype=float)
    n = math.isqrt(h.size)
    if n * n != h.size:
        raise ValueError(f"generator packing must have square length, got {h.size}")
    if not np.all(np.isfinite(h)):
        raise ValueError("generator entries must be finite")
    H = np.zeros((n, n), dtype=complex)
    H[np.diag_indices(n)] = h[:n]
    iu, ju = np.triu_indices(n, k=1)
    off = h[n::2] + 1j * h[n + 1 :: 2]
    H[iu, ju] = off
    H[ju, iu] = off.conj()
    return H


def pack_hermitian(H: np.ndarray) -> np.ndarray:
    """Inverse of :func:`hermitian_from_packed` (imaginary diagonal discarded)."""
    H = np.asarray(H, dtype=complex)
    n = H.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    h = np.empty(n * n)
    h[:n] = H.diagonal().real
    h[n::2] = H[iu, ju].real
    h[n + 1 :: 2] = H[iu, ju].imag
    return h


def unitary_from_generator(h: np.ndarray) -> np.ndarray:
    """U = exp(iH) for the Hermitian H packed in `h`.

    Computed by eigendecomposition, so U is unitary to machine precision for
    any finite input.
    """
    H = hermitian_from_packed(h)
    w, W = np.linalg.eigh(H)
    return (W * np.exp(1j * w)) @ W.conj().T


def pure_cm_entries(kappa: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Interleaved covariance entries of the pure state (kappa, h).

    Raw-array fast path without CovarianceMatrix construction; used inside
    optimizer objectives.  Returns a plain 2n x 2n ndarray.
    """
    kappa = np.asarray(kappa, dtype=float)
    n = kappa.size
    U = unitary_from_generator(h)
    X, Y = U.real, U.imag
    R = np.block([[X, Y], [-Y, X]])
    t2 = np.concatenate([np.exp(2.0 * kappa), np.exp(-2.0 * kappa)])
    blocked = 0.5 * ((R * t2) @ R.T)
    blocked = 0.5 * (blocked + blocked.T)
    perm = np.empty(2 * n, dtype=np.intp)
    perm[0::2] = np.arange(n)
    perm[1::2] = np.arange(n) + n
    return blocked[np.ix_(perm, perm)]


def params_to_cm(p: PureStateParams) -> cov.CovarianceMatrix:
    """Covariance matrix of the pure state described by `p`, interleaved.

    det V = (1/2)^(2n) holds automatically; the result passes the purity and
    physicality predicates at 1e-10 for any finite parameters.
    """
    return cov.CovarianceMatrix(
        p.n, cov.Ordering.INTERLEAVED, pure_cm_entries(p.kappa, p.h)
    )


def constraint_excess(
    V: cov.CovarianceMatrix, N: float, mode: ConstraintMode = ConstraintMode.PER_MODE
) -> float:
    """Squared violation of the energy bound; zero iff the constraint holds.

    PER_MODE sums max(0, e_k - (N + 1/2))^2 over modes; AVERAGE penalizes only
    the mean energy.  Smooth in the state, which keeps penalized objectives
    friendly to local descent.
    """
    energies = cov.mode_energies(V)
    bound = N + 0.5
    if ConstraintMode(mode) is ConstraintMode.PER_MODE:
        return float(np.sum(np.maximum(0.0, energies - bound) ** 2))
    return float(max(0.0, energies.mean() - bound) ** 2)


def kappa_sampling_bound(N: float) -> float:
    """Restart-sampling half-width for squeezing exponents, ln(2(2N+1)).

    A single mode's energy grows like cosh(2 kappa)/2, so exponents beyond
    this scale always violate the bound; sampling inside it avoids wasted
    restarts.  Not a hard bound during descent.
    """
    return math.log(2.0 * (2.0 * N + 1.0))


def random_params(
    n: int, rng: np.random.Generator, kappa_bound: float, h_bound: float = np.pi
) -> PureStateParams:
    """Uniform random parameters: kappa in ±kappa_bound, h entries in ±h_bound."""
    kappa = rng.uniform(-kappa_bound, kappa_bound, size=n)
    h = rng.uniform(-h_bound, h_bound, size=n * n)
    return PureStateParams(n, kappa, h)
