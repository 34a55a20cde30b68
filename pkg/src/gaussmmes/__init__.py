"""Energy-constrained Gaussian states and their multipartite entanglement.

The package builds covariance matrices of n-mode Gaussian states, evaluates
the normalized multipartite-entanglement potential chi over balanced
bipartitions, and minimizes it numerically to locate (and quantify the
frustration of) maximally multipartite entangled states under a per-mode
energy bound.
"""

__version__ = "0.1.0"

from .bipartitions import Bipartition, balanced_bipartitions
from .covariance import (
    CovarianceMatrix,
    Ordering,
    build_ghz3,
    build_thermal,
    build_twin_beam,
    cm_from_json,
    cm_to_json,
    is_physical,
    is_pure,
    mode_energies,
    mode_energy,
    purity,
    reduce,
    reorder,
    symplectic_form,
)
from .optimize import (
    ExperimentConfig,
    OptimizationResult,
    minimize_chi,
    minimize_delta_chi_at_chi_min,
    scan,
)
from .oracle import (
    WignerGrid,
    sample_random_physical_cm,
    verify_perfect_mmes,
    wigner_purity,
)
from .potential import EntanglementReport, chi, delta_chi, report
from .pure_states import (
    ConstraintMode,
    PureStateParams,
    constraint_excess,
    kappa_sampling_bound,
    params_to_cm,
    pure_cm_entries,
    random_params,
    unitary_from_generator,
)

__all__ = [
    "__version__",
    "Bipartition",
    "balanced_bipartitions",
    "CovarianceMatrix",
    "Ordering",
    "build_ghz3",
    "build_thermal",
    "build_twin_beam",
    "cm_from_json",
    "cm_to_json",
    "is_physical",
    "is_pure",
    "mode_energies",
    "mode_energy",
    "purity",
    "reduce",
    "reorder",
    "symplectic_form",
    "ExperimentConfig",
    "OptimizationResult",
    "minimize_chi",
    "minimize_delta_chi_at_chi_min",
    "scan",
    "WignerGrid",
    "sample_random_physical_cm",
    "verify_perfect_mmes",
    "wigner_purity",
    "EntanglementReport",
    "chi",
    "delta_chi",
    "report",
    "ConstraintMode",
    "PureStateParams",
    "constraint_excess",
    "kappa_sampling_bound",
    "params_to_cm",
    "pure_cm_entries",
    "random_params",
    "unitary_from_generator",
]
