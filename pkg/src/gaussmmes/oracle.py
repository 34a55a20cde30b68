"""Brute-force verifiers independent of the closed-form machinery.

Two cross-checks live here.  The Wigner-grid purity integrates the squared
Gaussian Wigner function on a phase-space grid,

    purity = (2 pi)^n * integral of W^2,

and must agree with the determinant formula; it is deliberately a plain
trapezoidal quadrature so its failure modes (truncation, resolution) are
predictable.  The random-state sampler produces energy-bounded physical
covariance matrices, mixed states included, for testing that nothing ever
undercuts the thermal purity floor and that no sampled pure state is ever
perfectly multipartite entangled for n >= 4.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import covariance as cov
from . import pure_states as ps
from .bipartitions import balanced_bipartitions

__all__ = [
    "GridTruncationWarning",
    "WignerGrid",
    "wigner_purity",
    "sample_random_physical_cm",
    "verify_perfect_mmes",
]

NORMALIZATION_TOL = 1e-4


class GridTruncationWarning(UserWarning):
    """The phase-space grid does not enclose the state's support well enough."""


def _grid_axis(extent: float, m: int) -> tuple[np.ndarray, np.ndarray]:
    axis = np.linspace(-extent, extent, m)
    axis = 0.5 * (axis - axis[::-1])  # exactly antisymmetric
    w = np.full(m, 2.0 * extent / (m - 1))
    w[0] *= 0.5
    w[-1] *= 0.5
    return axis, w


def _check_extent(V: cov.CovarianceMatrix, extent: float) -> None:
    needed = 6.0 * np.sqrt(V.entries.diagonal().max())
    if extent < needed:
        warnings.warn(
            f"grid half-width {extent} is below 6 standard deviations ({needed:.3f}); "
            "the quadrature will be truncated",
            GridTruncationWarning,
            stacklevel=3,
        )


def _integrals_1mode(M: np.ndarray, axis: np.ndarray, w: np.ndarray):
    # returns (sum w w E, sum w w E^2) with E = exp(-q/2), q the quadratic form
    x = axis[:, None]
    y = axis[None, :]
    q = M[0, 0] * x * x + 2.0 * M[0, 1] * x * y + M[1, 1] * y * y
    E = np.exp(-0.5 * q)
    i1 = float(np.einsum("ij,i,j->", E, w, w))
    i2 = float(np.einsum("ij,i,j->", E * E, w, w))
    return i1, i2


def _weighted_sum_3d(T: np.ndarray, w: np.ndarray) -> float:
    m = w.size
    return float(w @ ((T.reshape(m * m, m) @ w).reshape(m, m) @ w))


def _integrals_2mode(M: np.ndarray, axis: np.ndarray, w: np.ndarray):
    # Slab-streamed over the first variable; the full m^4 tensor is never
    # built.  The integrand is even under phase-space inversion and the axis
    # is exactly antisymmetric, so only half the slabs are evaluated.
    x = axis
    x1 = x[:, None, None]
    x2 = x[None, :, None]
    x3 = x[None, None, :]
    lin3 = -(M[0, 1] * x1 + M[0, 2] * x2 + M[0, 3] * x3)
    quad3 = -0.5 * (
        M[1, 1] * x1 * x1
        + M[2, 2] * x2 * x2
        + M[3, 3] * x3 * x3
        + 2.0 * (M[1, 2] * x1 * x2 + M[1, 3] * x1 * x3 + M[2, 3] * x2 * x3)
    )
    m = x.size
    buf = np.empty_like(quad3)
    i1 = 0.0
    i2 = 0.0
    for i in range((m + 1) // 2):
        x0 = x[i]
        mult = w[i] if 2 * i == m - 1 else w[i] + w[m - 1 - i]
        np.multiply(lin3, x0, out=buf)
        buf += quad3
        # folding the slab constant in first keeps the exponent <= 0, so
        # neither exp nor its square can overflow
        buf -= 0.5 * M[0, 0] * x0 * x0
        np.exp(buf, out=buf)
        i1 += mult * _weighted_sum_3d(buf, w)
        np.multiply(buf, buf, out=buf)
        i2 += mult * _weighted_sum_3d(buf, w)
    return i1, i2


def wigner_purity(V: cov.CovarianceMatrix, extent: float, m: int) -> float:
    """Purity via trapezoidal quadrature of the squared Wigner function.

    Supports n <= 2 (the grid has 2n dimensions).  The Wigner normalization
    integral is computed in the same pass; if it misses 1 by more than 1e-4,
    or the half-width is below 6 standard deviations, a
    :class:`GridTruncationWarning` is emitted.

    Parameters
    ----------
    V : CovarianceMatrix
        One- or two-mode physical covariance matrix.
    extent : float
        Half-width L of the grid hypercube [-L, L]^(2n).
    m : int
        Points per axis.
    """
    if V.n > 2:
        raise ValueError(
            f"Wigner-grid purity supports at most 2 modes (cost m^(2n)), got n={V.n}"
        )
    if m < 2:
        raise ValueError(f"need at least 2 points per axis, got {m}")
    if extent <= 0:
        raise ValueError(f"grid half-width must be positive, got {extent}")
    _check_extent(V, extent)
    entries = cov.reorder(V, cov.Ordering.INTERLEAVED).entries
    M = np.linalg.inv(entries)
    det = np.linalg.det(entries)
    norm_const = 1.0 / ((2.0 * np.pi) ** V.n * np.sqrt(det))
    axis, w = _grid_axis(extent, m)
    if V.n == 1:
        i1, i2 = _integrals_1mode(M, axis, w)
    else:
        i1, i2 = _integrals_2mode(M, axis, w)
    normalization = norm_const * i1
    if abs(normalization - 1.0) > NORMALIZATION_TOL:
        warnings.warn(
            f"Wigner normalization integral is {normalization:.6f}; "
            "grid extent or resolution is insufficient",
            GridTruncationWarning,
            stacklevel=2,
        )
    return float((2.0 * np.pi) ** V.n * norm_const**2 * i2)


@dataclass(frozen=True)
class WignerGrid:
    """Gaussian Wigner function sampled on a uniform phase-space grid.

    Diagnostic container for n <= 2 modes.  For two modes the full m^4 tensor
    is materialized, so m is capped at 64 there; :func:`wigner_purity` streams
    instead and has no such cap.
    """

    n: int
    extent: float
    m: int
    axis: np.ndarray = field(repr=False)
    samples: np.ndarray = field(repr=False)

    @classmethod
    def from_cm(cls, V: cov.CovarianceMatrix, extent: float, m: int) -> "WignerGrid":
        if V.n > 2:
            raise ValueError(f"WignerGrid supports at most 2 modes, got n={V.n}")
        if m < 64:
            raise ValueError(f"need at least 64 points per axis, got {m}")
        if V.n == 2 and m > 64:
            raise ValueError("two-mode grids are capped at m=64 (m^4 samples)")
        _check_extent(V, extent)
        entries = cov.reorder(V, cov.Ordering.INTERLEAVED).entries
        M = np.linalg.inv(entries)
        norm_const = 1.0 / (
            (2.0 * np.pi) ** V.n * np.sqrt(np.linalg.det(entries))
        )
        axis, _ = _grid_axis(extent, m)
        grids = np.meshgrid(*([axis] * 2 * V.n), indexing="ij")
        X = np.stack(grids, axis=-1)
        q = np.einsum("...a,ab,...b->...", X, M, X)
        samples = norm_const * np.exp(-0.5 * q)
        samples.setflags(write=False)
        return cls(V.n, extent, m, axis, samples)

    def normalization(self) -> float:
        """Grid integral of W; approximately 1 for a well-enclosed state."""
        _, w = _grid_axis(self.extent, self.m)
        total = self.samples
        for _ in range(2 * self.n):
            total = np.tensordot(total, w, axes=([-1], [0]))
        return float(total)


def sample_random_physical_cm(
    n: int, N: float, seed: int, count: int
) -> list[cov.CovarianceMatrix]:
    """Random energy-bounded physical covariance matrices, mixed states allowed.

    Each draw convexly mixes a random pure state (scaled up when needed) with
    a random thermal envelope, with the mixing weight chosen so every mode's
    energy stays at or below N + 1/2.  Half of the draws are pushed to within
    1% of the energy bound, since purity minimizers live on that boundary.
    Deterministic for a given seed.
    """
    if n < 1:
        raise ValueError(f"mode count must be positive, got {n}")
    if N < 0:
        raise ValueError(f"excitation bound must be nonnegative, got {N}")
    rng = np.random.default_rng(seed)
    bound = N + 0.5
    kappa_bound = ps.kappa_sampling_bound(N)
    out: list[cov.CovarianceMatrix] = []
    for i in range(count):
        saturate = i % 2 == 0
        for _ in range(100):
            pure = ps.pure_cm_entries(
                rng.uniform(-kappa_bound, kappa_bound, size=n),
                rng.uniform(-np.pi, np.pi, size=n * n),
            )
            e_pure = 0.5 * (pure.diagonal()[0::2] + pure.diagonal()[1::2])
            if saturate and e_pure.max() < bound:
                pure = (bound / e_pure.max()) * pure
                e_pure = (bound / e_pure.max()) * e_pure
            e_th = rng.uniform(0.0, N) + 0.5
            over = e_pure > e_th
            if np.any(over):
                t_max = min(1.0, float(np.min((bound - e_th) / (e_pure[over] - e_th))))
            else:
                t_max = 1.0
            t_max *= 1.0 - 1e-12
            t = t_max * (rng.uniform(0.99, 1.0) if saturate else rng.uniform(0.0, 1.0))
            entries = t * pure + (1.0 - t) * (e_th * np.eye(2 * n))
            V = cov.CovarianceMatrix(n, cov.Ordering.INTERLEAVED, entries)
            if cov.is_physical(V, 1e-10) and cov.mode_energies(V).max() <= bound + 1e-12:
                out.append(V)
                break
        else:
            raise RuntimeError("rejection sampling failed to produce a physical CM")
    return out


def verify_perfect_mmes(V: cov.CovarianceMatrix, N: float, tol: float) -> bool:
    """True iff every balanced reduction of V attains the thermal purity floor.

    The floor at excitation bound N is 1 / (2^{n_A} (N + 1/2)^{n_A}); a pure
    state hitting it for every balanced subset is maximally entangled for
    every bipartition.
    """
    floor = 1.0 / (2.0 * (N + 0.5)) ** (V.n // 2)
    for part in balanced_bipartitions(V.n):
        if abs(cov.purity(cov.reduce(V, part)) - floor) > tol:
            return False
    return True
