"""Constrained minimization of the entanglement potential over pure states.

The search runs in the unconstrained chart of `pure_states`: chi plus a
quadratic exterior penalty on the energy excess is minimized by Nelder-Mead
simplex descent from seeded random restarts, with the penalty multiplier
escalating over rounds; the best candidate then gets a finite-difference
quasi-Newton polish.  A result is feasible when its constraint excess is at
most 1e-6, which the final penalty multiplier (1e6) pins down.

A second, lexicographic search minimizes delta_chi among states whose chi
stays within 1e-4 of the located minimum; this certifies (or refutes)
uniformly optimal entanglement distribution at a given mode count.

Everything is deterministic for a fixed config: restart seeds derive from
(seed, grid index, restart index), thread scheduling cannot change any
number, and persisted artifacts never contain timing data.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from .bipartitions import balanced_row_indices
from .pure_states import ConstraintMode, PureStateParams, kappa_sampling_bound

__all__ = [
    "ExperimentConfig",
    "RestartTrace",
    "OptimizationResult",
    "minimize_chi",
    "minimize_delta_chi_at_chi_min",
    "scan",
    "CSV_HEADER",
    "scan_csv_lines",
    "result_to_dict",
    "results_to_jsonl",
]

FEASIBILITY_TOL = 1e-6
CHI_MATCH_TOL = 1e-4
OBJECTIVE_CEILING = 1e30


@dataclass(frozen=True)
class ExperimentConfig:
    """Settings of one optimization run or N-scan.

    `max_iters` bounds the simplex iterations of each penalty round (0 picks
    a dimension-scaled default); `tol` is the simplex function-spread
    convergence target.  The seed fully determines every number produced.
    """

    n: int
    N_grid: tuple[float, ...] = (1.0,)
    constraint_mode: ConstraintMode = ConstraintMode.PER_MODE
    restarts: int = 16
    max_iters: int = 0
    tol: float = 1e-12
    seed: int = 0
    penalty_schedule: tuple[float, ...] = (1e2, 1e4, 1e6)
    warm_start: bool = True
    threads: int = 1

    def __post_init__(self):
        object.__setattr__(self, "N_grid", tuple(float(N) for N in self.N_grid))
        object.__setattr__(
            self, "penalty_schedule", tuple(float(p) for p in self.penalty_schedule)
        )
        object.__setattr__(self, "constraint_mode", ConstraintMode(self.constraint_mode))
        if self.n < 2:
            raise ValueError(f"need at least two modes, got n={self.n}")
        if not self.N_grid:
            raise ValueError("N_grid must be nonempty")
        if any(N < 0 for N in self.N_grid):
            raise ValueError("excitation bounds must be nonnegative")
        if list(self.N_grid) != sorted(self.N_grid):
            raise ValueError("N_grid must be sorted ascending")
        if self.restarts < 1:
            raise ValueError("need at least one restart")
        if self.max_iters < 0:
            raise ValueError("max_iters must be nonnegative")
        if self.tol <= 0:
            raise ValueError("convergence tolerance must be positive")
        if not self.penalty_schedule or any(p <= 0 for p in self.penalty_schedule):
            raise ValueError("penalty schedule must be positive multipliers")
        if self.threads < 1:
            raise ValueError("thread count must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class RestartTrace:
    """Summary of one local search (index -1 marks a warm start)."""

    index: int
    chi: float
    delta_chi: float
    excess: float
    feasible: bool
    evaluations: int


@dataclass(frozen=True)
class OptimizationResult:
    """Best state found for one (n, N) point, with per-restart diagnostics.

    `min_feasible_iterate_chi` is the smallest chi seen at any
    constraint-satisfying iterate during the whole run; it can never drop
    below 1 (thermal reductions bound the purity), which the acceptance suite
    checks.  `wall_time` is informational and never serialized.
    """

    n: int
    N: float
    seed: int
    restarts: int
    constraint_mode: ConstraintMode
    best_params: PureStateParams | None
    best_chi: float
    best_delta_chi: float
    feasible: bool
    min_feasible_iterate_chi: float
    traces: tuple[RestartTrace, ...]
    wall_time: float = field(compare=False)


class _Evaluator:
    """chi / delta_chi / energy-excess of a parameter vector, on raw arrays."""

    def __init__(self, n: int, N: float, mode: ConstraintMode):
        from .pure_states import pure_cm_entries

        self.n = n
        self.N = N
        self.mode = ConstraintMode(mode)
        self.rows = balanced_row_indices(n)
        self.norm = (N + 0.5) ** (n // 2)
        self.bound = N + 0.5
        self._entries = pure_cm_entries
        self.min_feasible_chi = np.inf
        self.evaluations = 0

    def stats(self, x: np.ndarray):
        """(chi, delta_chi, penalty excess, linear violation) at vector x.

        The penalty excess is the squared constraint violation driving the
        exterior penalty; feasibility is judged on the linear violation
        (worst per-mode over-energy, or mean over-energy in AVERAGE mode).
        """
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            entries = self._entries(x[: self.n], x[self.n :])
            rows = self.rows
            sub = entries[rows[:, :, None], rows[:, None, :]]
            values = self.norm / np.sqrt(np.linalg.det(sub))
            chi = float(np.mean(values))
            radicand = max(0.0, float(np.mean(values**2) - chi * chi))
        diag = entries.diagonal()
        energies = 0.5 * (diag[0::2] + diag[1::2])
        if self.mode is ConstraintMode.PER_MODE:
            over = np.maximum(0.0, energies - self.bound)
            excess = float(np.sum(over**2))
            violation = float(over.max())
        else:
            violation = float(max(0.0, energies.mean() - self.bound))
            excess = violation**2
        return chi, float(np.sqrt(radicand)), excess, violation

    def chi_objective(self, lam: float):
        def fun(x: np.ndarray) -> float:
            self.evaluations += 1
            if not np.all(np.isfinite(x)):
                return OBJECTIVE_CEILING
            chi, _, excess, violation = self.stats(x)
            if not np.isfinite(chi):
                return OBJECTIVE_CEILING
            if violation <= FEASIBILITY_TOL and chi < self.min_feasible_chi:
                self.min_feasible_chi = chi
            return chi + lam * excess

        return fun

    def variance_objective(self, lam: float, chi_cap: float):
        # smooth surrogate for delta_chi (its square), capped to the chi shell
        def fun(x: np.ndarray) -> float:
            self.evaluations += 1
            if not np.all(np.isfinite(x)):
                return OBJECTIVE_CEILING
            chi, delta, excess, violation = self.stats(x)
            if not np.isfinite(chi) or not np.isfinite(delta):
                return OBJECTIVE_CEILING
            if violation <= FEASIBILITY_TOL and chi < self.min_feasible_chi:
                self.min_feasible_chi = chi
            return delta * delta + lam * excess + 100.0 * lam * max(0.0, chi - chi_cap) ** 2

        return fun


def _restart_rng(seed: int, grid_key: int, restart: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((seed, grid_key, restart)))


def _draw_start(n: int, N: float, rng: np.random.Generator) -> np.ndarray:
    kappa = rng.uniform(-kappa_sampling_bound(N), kappa_sampling_bound(N), size=n)
    h = rng.uniform(-np.pi, np.pi, size=n * n)
    return np.concatenate([kappa, h])


def _simplex_descent(fun, x0, max_iters: int, tol: float) -> np.ndarray:
    res = _scipy_minimize(
        fun,
        x0,
        method="Nelder-Mead",
        options={
            "maxiter": max_iters,
            "maxfev": 2 * max_iters,
            "xatol": 1e-10,
            "fatol": tol,
            "adaptive": True,
        },
    )
    return res.x


def _round_iters(config: ExperimentConfig) -> int:
    if config.max_iters > 0:
        return config.max_iters
    dim = config.n + config.n**2
    return 200 * dim


def _local_search(
    make_objective, x0, config: ExperimentConfig, extra_stiff_round: bool = False
) -> np.ndarray:
    x = np.asarray(x0, dtype=float)
    iters = _round_iters(config)
    schedule = config.penalty_schedule
    if extra_stiff_round:
        # the variance objective's energy slope is steeper than chi's, so its
        # exterior-penalty equilibrium needs one stiffer round to land inside
        # the feasibility tolerance
        schedule = schedule + (100.0 * schedule[-1],)
    for lam in schedule:
        x = _simplex_descent(make_objective(lam), x, iters, config.tol)
    return x


def _polish(make_objective, x, config: ExperimentConfig) -> np.ndarray:
    # stiffer multiplier than the descent rounds: the exterior-penalty
    # equilibrium violation scales like 1/lambda, and the polished optimum
    # must sit well inside the 1e-6 feasibility tolerance
    lam = max(1e9, config.penalty_schedule[-1])
    fun = make_objective(lam)
    f0 = fun(x)
    # finite-difference step matched to the penalty stiffness: the default
    # sqrt(machine-eps) step makes the gradient noise swamp the objective
    res = _scipy_minimize(
        fun,
        x,
        method="L-BFGS-B",
        options={"maxfun": 20000, "maxiter": 500, "eps": 1e-10},
    )
    return res.x if res.fun < f0 else x


def _run_candidates(
    config: ExperimentConfig,
    N: float,
    starts: Sequence[tuple[int, np.ndarray]],
    objective_name: str,
    chi_cap: float | None = None,
):
    """Run one local search per start; return evaluators, end points, traces."""

    def one(item):
        index, x0 = item
        ev = _Evaluator(config.n, N, config.constraint_mode)
        make = (
            ev.chi_objective
            if objective_name == "chi"
            else lambda lam: ev.variance_objective(lam, chi_cap)
        )
        x = _local_search(make, x0, config, extra_stiff_round=objective_name == "variance")
        return ev, x

    if config.threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            outcomes = list(pool.map(one, starts))
    else:
        outcomes = [one(item) for item in starts]

    traces = []
    finals = []
    for (index, _), (ev, x) in zip(starts, outcomes):
        chi, delta, _, violation = ev.stats(x)
        feasible = violation <= FEASIBILITY_TOL
        traces.append(
            RestartTrace(index, chi, delta, violation, feasible, ev.evaluations)
        )
        finals.append((ev, x, chi, delta, violation, feasible))
    return finals, traces


def _select(finals, key):
    best = None
    best_key = None
    for item in finals:
        k = key(item)
        if best_key is None or k < best_key:
            best, best_key = item, k
    return best


def minimize_chi(
    config: ExperimentConfig,
    N: float,
    warm_params: PureStateParams | None = None,
    grid_key: int = 0,
) -> OptimizationResult:
    """Search for the minimal entanglement potential at excitation bound N.

    Runs `config.restarts` independent penalized simplex descents from seeded
    random draws (plus one warm start if `warm_params` is given), polishes the
    best candidate with finite-difference L-BFGS, and returns the feasible
    minimum.  If no restart ends feasible the result carries
    ``feasible=False`` and the least-infeasible candidate.
    """
    if N < 0:
        raise ValueError(f"excitation bound must be nonnegative, got {N}")
    t0 = time.perf_counter()
    starts: list[tuple[int, np.ndarray]] = []
    if warm_params is not None:
        starts.append((-1, warm_params.as_vector()))
    for i in range(config.restarts):
        rng = _restart_rng(config.seed, grid_key, i)
        starts.append((i, _draw_start(config.n, N, rng)))

    finals, traces = _run_candidates(config, N, starts, "chi")
    feasible_finals = [f for f in finals if f[5]]
    pool = feasible_finals or finals
    # rank by chi among feasible candidates, by penalized size otherwise
    best = _select(pool, key=lambda f: f[2] + (0.0 if f[5] else f[4] * 1e6))

    # the polish minimizes the stiff-penalty objective; keep its output unless
    # it pushed the energy violation past the feasibility tolerance
    ev, x_pre = best[0], best[1]
    x = _polish(ev.chi_objective, x_pre, config)
    chi, delta, _, violation = ev.stats(x)
    if violation > FEASIBILITY_TOL and violation > best[4]:
        x = x_pre
        chi, delta, _, violation = ev.stats(x)
    feasible = violation <= FEASIBILITY_TOL

    min_chi = min(f[0].min_feasible_chi for f in finals)
    return OptimizationResult(
        n=config.n,
        N=float(N),
        seed=config.seed,
        restarts=config.restarts,
        constraint_mode=config.constraint_mode,
        best_params=PureStateParams.from_vector(config.n, x),
        best_chi=chi,
        best_delta_chi=delta,
        feasible=feasible,
        min_feasible_iterate_chi=float(min_chi),
        traces=tuple(traces),
        wall_time=time.perf_counter() - t0,
    )


def minimize_delta_chi_at_chi_min(
    config: ExperimentConfig,
    N: float,
    base: OptimizationResult | None = None,
    grid_key: int = 0,
) -> OptimizationResult:
    """Lexicographic search: smallest delta_chi with chi within 1e-4 of minimal.

    The chi phase (reused from `base` when given) fixes the target shell;
    the second phase minimizes the purity variance under both the energy
    penalty and a penalty on leaving the shell.  Candidates count as feasible
    only when they satisfy the energy bound and stay inside the shell.
    """
    if base is None:
        base = minimize_chi(config, N, grid_key=grid_key)
    if not base.feasible or base.best_params is None:
        return base
    t0 = time.perf_counter()
    chi_min = base.best_chi
    chi_cap = chi_min + 0.5 * CHI_MATCH_TOL

    base_x = base.best_params.as_vector()
    starts: list[tuple[int, np.ndarray]] = [(-1, base_x)]
    for i in range(config.restarts):
        rng = _restart_rng(config.seed, grid_key + 10_000, i)
        if i % 2 == 0:
            starts.append((i, base_x + rng.normal(scale=0.1, size=base_x.size)))
        else:
            starts.append((i, _draw_start(config.n, N, rng)))

    finals, traces = _run_candidates(config, N, starts, "variance", chi_cap=chi_cap)

    def in_shell(f):
        return f[5] and f[2] <= chi_min + CHI_MATCH_TOL

    shell = [f for f in finals if in_shell(f)]
    pool = shell or finals
    best = _select(pool, key=lambda f: f[3] if in_shell(f) else f[3] + f[4] * 1e6 + 1e3)

    ev, x_pre = best[0], best[1]
    x = _polish(lambda lam: ev.variance_objective(lam, chi_cap), x_pre, config)
    chi, delta, _, violation = ev.stats(x)
    if (violation > FEASIBILITY_TOL and violation > best[4]) or chi > chi_min + CHI_MATCH_TOL:
        x = x_pre
        chi, delta, _, violation = ev.stats(x)
    feasible = violation <= FEASIBILITY_TOL and chi <= chi_min + CHI_MATCH_TOL

    min_chi = min(
        [f[0].min_feasible_chi for f in finals] + [base.min_feasible_iterate_chi]
    )
    return OptimizationResult(
        n=config.n,
        N=float(N),
        seed=config.seed,
        restarts=config.restarts,
        constraint_mode=config.constraint_mode,
        best_params=PureStateParams.from_vector(config.n, x),
        best_chi=chi,
        best_delta_chi=delta,
        feasible=bool(feasible),
        min_feasible_iterate_chi=float(min_chi),
        traces=tuple(traces),
        wall_time=time.perf_counter() - t0,
    )


def scan(config: ExperimentConfig) -> list[OptimizationResult]:
    """One minimize_chi run per grid point, ascending in N.

    With `config.warm_start` each point also restarts from the previous
    point's optimum, which keeps the located branch continuous; the fresh
    random restarts still run, so curve monotonicity is not a warm-start
    artifact.  Infeasible points are flagged in their result rows, never
    fatal.
    """
    results: list[OptimizationResult] = []
    warm: PureStateParams | None = None
    for gi, N in enumerate(config.N_grid):
        result = minimize_chi(config, N, warm_params=warm, grid_key=gi)
        if config.warm_start and result.feasible:
            warm = result.best_params
        results.append(result)
    return results


# --- persistence (no timing data; artifacts must be bit-reproducible) ---

CSV_HEADER = "n,N,chi_min,delta_chi,feasible,restarts,seed"


def scan_csv_lines(results: Iterable[OptimizationResult]) -> list[str]:
    lines = [CSV_HEADER]
    for r in results:
        lines.append(
            f"{r.n},{r.N!r},{r.best_chi!r},{r.best_delta_chi!r},"
            f"{'true' if r.feasible else 'false'},{r.restarts},{r.seed}"
        )
    return lines


def result_to_dict(result: OptimizationResult) -> dict:
    return {
        "n": result.n,
        "N": result.N,
        "seed": result.seed,
        "restarts": result.restarts,
        "constraint_mode": result.constraint_mode.value,
        "chi_min": result.best_chi,
        "delta_chi": result.best_delta_chi,
        "feasible": result.feasible,
        "min_feasible_iterate_chi": result.min_feasible_iterate_chi,
        "best_params": None
        if result.best_params is None
        else {
            "n": result.best_params.n,
            "kappa": result.best_params.kappa.tolist(),
            "h": result.best_params.h.tolist(),
        },
        "traces": [
            {
                "index": t.index,
                "chi": t.chi,
                "delta_chi": t.delta_chi,
                "excess": t.excess,
                "feasible": t.feasible,
                "evaluations": t.evaluations,
            }
            for t in result.traces
        ],
    }


def results_to_jsonl(results: Iterable[OptimizationResult]) -> str:
    return "\n".join(json.dumps(result_to_dict(r)) for r in results) + "\n"
