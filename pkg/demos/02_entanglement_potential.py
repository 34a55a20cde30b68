#!/usr/bin/env python3
"""The normalized multipartite-entanglement potential chi and its spread.

chi averages the normalized reduced purity over all balanced bipartitions;
chi = 1 means every balanced reduction is exactly thermal (a perfect MMES),
and delta_chi measures how unevenly the entanglement is distributed.
"""

import numpy as np

from gaussmmes import (
    balanced_bipartitions,
    build_ghz3,
    build_twin_beam,
    chi,
    delta_chi,
    kappa_sampling_bound,
    mode_energies,
    params_to_cm,
    random_params,
    report,
)

print("== perfect states have chi = 1 ==")
for N in (0.5, 1.0, 5.0):
    print(f"N={N}:  chi(twin-beam) = {chi(build_twin_beam(N), N):.12f}   "
          f"chi(GHZ) = {chi(build_ghz3(N), N):.12f}")

print("\n== balanced bipartitions ==")
for n in (3, 4, 5):
    parts = balanced_bipartitions(n)
    print(f"n={n}: {len(parts)} subsets, first three {[p.modes for p in parts[:3]]}")

print("\n== a random pure 4-mode state is worse than perfect ==")
rng = np.random.default_rng(0)
V = params_to_cm(random_params(4, rng, kappa_sampling_bound(1.0)))
# normalize against the bound this state actually satisfies
N = mode_energies(V).max() - 0.5
rep = report(V, N)
print(f"energy bound N     : {N:.4f}")
print(f"chi                : {rep.chi:.6f}  (>= 1 always)")
print(f"delta_chi          : {rep.delta_chi:.6f}")
print("per-bipartition normalized purities:")
for part, value in rep.per_partition:
    print(f"  A = {part.modes}: {value:.6f}")

print("\n== the report serializes to JSON ==")
print(report(build_ghz3(1.0), 1.0).to_json())
print("\ndelta_chi of the GHZ state:", delta_chi(build_ghz3(1.0), 1.0))
