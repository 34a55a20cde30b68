"""Balanced bipartitions of n modes and their index bookkeeping.

A balanced bipartition splits the modes {1..n} into (A, complement) with
|A| = floor(n/2).  The entanglement potential averages over all C(n, [n/2])
such subsets; for even n that enumeration contains each partition twice (A
and its complement), which is kept deliberately so the average carries the
binomial normalization literally.  On pure states the two members of a pair
have equal reduced purity, so the value is unaffected.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

__all__ = ["Bipartition", "balanced_bipartitions"]


@dataclass(frozen=True)
class Bipartition:
    """A subset of mode indices defining one side of a bipartition.

    `modes` is a sorted tuple of 1-based indices; `n` is the total mode count.
    """

    modes: tuple[int, ...]
    n: int

    def __post_init__(self):
        modes = tuple(sorted(int(k) for k in self.modes))
        if len(set(modes)) != len(modes):
            raise ValueError(f"duplicate mode indices in {self.modes}")
        if not modes:
            raise ValueError("bipartition subset must be nonempty")
        if modes[0] < 1 or modes[-1] > self.n:
            raise ValueError(f"mode indices must lie in 1..{self.n}, got {modes}")
        object.__setattr__(self, "modes", modes)

    @property
    def complement(self) -> "Bipartition":
        rest = tuple(k for k in range(1, self.n + 1) if k not in set(self.modes))
        return Bipartition(rest, self.n)

    def __len__(self) -> int:
        return len(self.modes)

    def __iter__(self):
        return iter(self.modes)


def balanced_bipartitions(n: int) -> list[Bipartition]:
    """All subsets A of {1..n} with |A| = floor(n/2), in lexicographic order.

    The list has C(n, floor(n/2)) entries, matching the normalization of the
    entanglement-potential average.

    Raises
    ------
    ValueError
        If n < 2 (no bipartition exists).
    """
    if n < 2:
        raise ValueError(f"need at least two modes to bipartition, got n={n}")
    size = n // 2
    parts = [Bipartition(c, n) for c in itertools.combinations(range(1, n + 1), size)]
    assert len(parts) == comb(n, size)
    return parts


@lru_cache(maxsize=None)
def balanced_row_indices(n: int) -> np.ndarray:
    """0-based interleaved row indices of every balanced subset, shape (B, 2*[n/2]).

    Row b lists the covariance-matrix rows/columns kept when reducing to the
    b-th subset of :func:`balanced_bipartitions`.  Cached per n; used to batch
    the per-bipartition subdeterminants.
    """
    parts = balanced_bipartitions(n)
    rows = np.array(
        [[r for k in p.modes for r in (2 * k - 2, 2 * k - 1)] for p in parts],
        dtype=np.intp,
    )
    rows.setflags(write=False)
    return rows
