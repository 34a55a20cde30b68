#!/usr/bin/env python3
"""Closed-form Gaussian states: thermal, twin-beam, and three-mode GHZ.

Builds the states with known covariance matrices, checks their purity and
per-mode energy, and verifies that the two pure constructions are maximally
entangled for every balanced bipartition at their energy bound.
"""

import numpy as np

from gaussmmes import (
    build_ghz3,
    build_thermal,
    build_twin_beam,
    is_physical,
    is_pure,
    mode_energies,
    purity,
    reduce,
    verify_perfect_mmes,
)

N = 1.0  # mean excitations allowed per mode

print("== thermal state (the purity minimizer at fixed energy) ==")
th = build_thermal(3, N)
print(f"purity             : {purity(th):.6f}")
print(f"closed form 1/(2(N+1/2))^n : {1.0 / (2.0 * (N + 0.5)) ** 3:.6f}")
print(f"mode energies      : {mode_energies(th)}")

print("\n== twin-beam state (two modes, pure, reductions thermal) ==")
tb = build_twin_beam(N)
print("covariance matrix:")
print(np.array_str(tb.entries, precision=3))
print(f"global purity      : {purity(tb):.12f}")
print(f"pure / physical    : {is_pure(tb)} / {is_physical(tb)}")
print(f"reduction to mode 1:\n{reduce(tb, [1]).entries}")
print(f"perfect MMES at N={N}: {verify_perfect_mmes(tb, N, 1e-9)}")

print("\n== Gaussian GHZ state (three modes) ==")
ghz = build_ghz3(N)
v_plus, v_minus = ghz.entries[0, 2], ghz.entries[1, 3]
print(f"off-diagonal blocks diag({v_plus:.6f}, {v_minus:.6f})")
print(f"global purity      : {purity(ghz):.12f}")
print(f"every mode energy  : {mode_energies(ghz)}")
print(f"perfect MMES at N={N}: {verify_perfect_mmes(ghz, N, 1e-9)}")

print("\nBoth constructions saturate the energy bound with thermal reductions,")
print("which is exactly what maximal bipartite entanglement requires.")
