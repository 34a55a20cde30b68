"""Command-line interface: verification battery, single runs, and N-scans.

Subcommands
-----------
verify    run the self-contained check battery (closed-form constructors,
          thermal purity floor, Wigner-grid oracle, chart purity); exit 0
          iff everything passes.  `--json` switches to a machine-readable
          report with per-check extrema.
oracle    same battery, always as the JSON report.
optimize  minimize chi for one (n, N) point and print the result.
scan      minimize chi over an N grid, emitting CSV (and optional JSON
          lines with the full per-point results).
rerun     replay a run manifest, reproducing its artifacts byte-for-byte.

Flags override config-file values, which override defaults.  The config file
is flat `key = value` text mirroring ExperimentConfig field names.  All
randomness is governed by --seed (no environment overrides), so every
command is reproducible.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import covariance as cov
from . import oracle as orc
from . import potential as pot
from . import pure_states as ps
from .optimize import (
    CSV_HEADER,
    ExperimentConfig,
    minimize_chi,
    result_to_dict,
    results_to_jsonl,
    scan,
    scan_csv_lines,
)

CONFIG_KEYS = {
    "n": int,
    "N_grid": str,
    "constraint_mode": str,
    "restarts": int,
    "max_iters": int,
    "tol": float,
    "seed": int,
    "penalty_schedule": str,
    "warm_start": lambda s: s.strip().lower() in ("1", "true", "yes", "on"),
    "threads": int,
}


def parse_grid(text: str) -> tuple[float, ...]:
    """Inclusive 'start:stop:step' grid of excitation bounds."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be start:stop:step, got {text!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0:
        raise ValueError(f"grid step must be positive, got {step}")
    if stop < start:
        raise ValueError(f"grid stop {stop} is below start {start}")
    count = int(round((stop - start) / step)) + 1
    grid = [start + i * step for i in range(count)]
    grid = [g for g in grid if g <= stop + 1e-9 * max(1.0, step)]
    return tuple(grid)


def load_config_file(path: str) -> dict:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = CONFIG_KEYS[key](value.strip())
    return values


def build_experiment_config(args, file_values: dict, N_grid: tuple[float, ...]) -> ExperimentConfig:
    def pick(flag_value, key, default):
        if flag_value is not None:
            return flag_value
        return file_values.get(key, default)

    n = pick(args.modes, "n", None)
    if n is None:
        raise ValueError("mode count is required (--modes flag or 'n' config key)")
    schedule = file_values.get("penalty_schedule")
    if isinstance(schedule, str):
        schedule = tuple(float(s) for s in schedule.split(","))
    return ExperimentConfig(
        n=n,
        N_grid=N_grid,
        constraint_mode=pick(args.constraint, "constraint_mode", "per-mode"),
        restarts=pick(args.restarts, "restarts", 16),
        max_iters=pick(args.max_iters, "max_iters", 0),
        tol=pick(None, "tol", 1e-12),
        seed=pick(args.seed, "seed", 0),
        penalty_schedule=schedule or (1e2, 1e4, 1e6),
        warm_start=pick(None, "warm_start", True),
        threads=pick(args.threads, "threads", 1),
    )


# --- verification battery ---


def check_closed_form_constructors(args) -> dict:
    worst_chi = 0.0
    worst_det = 0.0
    ok = True
    for N in (0.5, 1.0, 5.0):
        for build in (cov.build_twin_beam, cov.build_ghz3):
            V = build(N)
            target = 0.25**V.n
            worst_det = max(worst_det, abs(np.linalg.det(V.entries) - target) / target)
            worst_chi = max(worst_chi, abs(pot.chi(V, N) - 1.0))
            ok &= cov.is_pure(V, 1e-9)
            ok &= cov.is_physical(V, 1e-9)
            ok &= orc.verify_perfect_mmes(V, N, 1e-9)
    ok &= worst_chi <= 1e-9
    return {
        "name": "closed-form-constructors",
        "passed": bool(ok),
        "observed": {"max_abs_chi_minus_1": worst_chi, "max_rel_det_error": worst_det},
    }


def check_thermal_purity_floor(args) -> dict:
    worst = np.inf
    for n, N in ((1, 1.0), (2, 1.0), (3, 0.5)):
        floor = 1.0 / (2.0 * (N + 0.5)) ** n
        for V in orc.sample_random_physical_cm(n, N, seed=args.seed, count=args.samples):
            worst = min(worst, cov.purity(V) - floor)
    return {
        "name": "thermal-purity-floor",
        "passed": bool(worst >= -1e-12),
        "observed": {"min_purity_margin": worst},
    }


def check_wigner_oracle(args) -> dict:
    worst = 0.0
    one_mode = orc.sample_random_physical_cm(1, 1.0, seed=args.seed + 1, count=args.wigner_cases)
    for V in one_mode:
        p = cov.purity(V)
        worst = max(worst, abs(orc.wigner_purity(V, 10.0, 256) - p) / p)
    two_mode = [
        V
        for V in orc.sample_random_physical_cm(2, 1.0, seed=args.seed + 2, count=8 * args.wigner_cases)
        if np.linalg.eigvalsh(V.entries).min() >= 0.06
    ][: max(2, args.wigner_cases // 3)]
    for V in two_mode:
        p = cov.purity(V)
        worst = max(worst, abs(orc.wigner_purity(V, 12.0, 128) - p) / p)
    return {
        "name": "wigner-oracle",
        "passed": bool(worst <= 1e-5),
        "observed": {"max_rel_purity_error": worst, "two_mode_cases": len(two_mode)},
    }


def check_chart_purity(args) -> dict:
    worst_det = 0.0
    all_physical = True
    rng = np.random.default_rng(args.seed + 3)
    for n in range(2, 8):
        target = 0.25**n
        for _ in range(max(10, args.samples // 20)):
            p = ps.random_params(n, rng, ps.kappa_sampling_bound(1.0))
            V = ps.params_to_cm(p)
            worst_det = max(worst_det, abs(np.linalg.det(V.entries) - target) / target)
            all_physical &= cov.is_physical(V, 1e-10)
    passed = worst_det <= 1e-10 and all_physical
    return {
        "name": "chart-purity",
        "passed": bool(passed),
        "observed": {"max_rel_det_error": worst_det, "all_physical": all_physical},
    }


CHECKS = (
    check_closed_form_constructors,
    check_thermal_purity_floor,
    check_wigner_oracle,
    check_chart_purity,
)


def cmd_verify(args) -> int:
    reports = [check(args) for check in CHECKS]
    passed = all(r["passed"] for r in reports)
    if args.json:
        print(json.dumps({"passed": passed, "checks": reports}, indent=2))
    else:
        for r in reports:
            details = ", ".join(f"{k}={v:.3e}" if isinstance(v, float) else f"{k}={v}"
                                for k, v in r["observed"].items())
            print(f"{'PASS' if r['passed'] else 'FAIL'} {r['name']}  ({details})")
        print("all checks passed" if passed else "verification FAILED")
    if not passed:
        first = next(r["name"] for r in reports if not r["passed"])
        print(f"first failing check: {first}", file=sys.stderr)
        return 1
    return 0


# --- optimization commands ---


def write_manifest(path: str, command: str, config: ExperimentConfig, artifacts: dict):
    manifest = {
        "tool_version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "command": command,
        "seed": config.seed,
        "config": {
            "n": config.n,
            "N_grid": list(config.N_grid),
            "constraint_mode": config.constraint_mode.value,
            "restarts": config.restarts,
            "max_iters": config.max_iters,
            "tol": config.tol,
            "seed": config.seed,
            "penalty_schedule": list(config.penalty_schedule),
            "warm_start": config.warm_start,
            "threads": config.threads,
        },
        "artifacts": {k: v for k, v in artifacts.items() if v},
    }
    Path(path).write_text(json.dumps(manifest, indent=2) + "\n")


def run_optimize(config: ExperimentConfig, out: str | None, manifest: str | None) -> int:
    t0 = time.perf_counter()
    result = minimize_chi(config, config.N_grid[0])
    elapsed = time.perf_counter() - t0
    print(f"chi_min = {result.best_chi!r}")
    print(f"delta_chi = {result.best_delta_chi!r}")
    print(f"feasible = {'true' if result.feasible else 'false'}")
    print(f"(completed in {elapsed:.1f} s)", file=sys.stderr)
    if out:
        Path(out).write_text(json.dumps(result_to_dict(result), indent=2) + "\n")
    if manifest:
        write_manifest(manifest, "optimize", config, {"out": out})
    return 0


def run_scan(
    config: ExperimentConfig, out: str | None, jsonl: str | None, manifest: str | None
) -> int:
    t0 = time.perf_counter()
    results = scan(config)
    elapsed = time.perf_counter() - t0
    csv_text = "\n".join(scan_csv_lines(results)) + "\n"
    if out:
        Path(out).write_text(csv_text)
    else:
        print(csv_text, end="")
    if jsonl:
        Path(jsonl).write_text(results_to_jsonl(results))
    print(f"(scanned {len(results)} grid points in {elapsed:.1f} s)", file=sys.stderr)
    if manifest:
        write_manifest(manifest, "scan", config, {"out": out, "jsonl": jsonl})
    return 0


def cmd_rerun(args) -> int:
    manifest = json.loads(Path(args.manifest).read_text())
    config = ExperimentConfig(
        n=manifest["config"]["n"],
        N_grid=tuple(manifest["config"]["N_grid"]),
        constraint_mode=manifest["config"]["constraint_mode"],
        restarts=manifest["config"]["restarts"],
        max_iters=manifest["config"]["max_iters"],
        tol=manifest["config"]["tol"],
        seed=manifest["config"]["seed"],
        penalty_schedule=tuple(manifest["config"]["penalty_schedule"]),
        warm_start=manifest["config"]["warm_start"],
        threads=manifest["config"]["threads"],
    )
    artifacts = manifest.get("artifacts", {})
    if manifest["command"] == "optimize":
        return run_optimize(config, artifacts.get("out"), None)
    return run_scan(config, artifacts.get("out"), artifacts.get("jsonl"), None)


# --- argument parsing ---


def _add_optimizer_flags(p: argparse.ArgumentParser):
    p.add_argument("--modes", type=int, help="number of bosonic modes n")
    p.add_argument("--restarts", type=int, help="independent local searches per point")
    p.add_argument("--seed", type=int, help="seed determining every random draw")
    p.add_argument(
        "--constraint",
        choices=["per-mode", "average"],
        help="energy constraint form (default per-mode)",
    )
    p.add_argument("--max-iters", type=int, dest="max_iters",
                   help="simplex iterations per penalty round (0 = auto)")
    p.add_argument("--threads", type=int, help="worker cap; any value gives identical numbers")
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--out", help="output path (JSON for optimize, CSV for scan)")
    p.add_argument("--manifest", help="write a run manifest here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaussmmes",
        description="Energy-constrained Gaussian states and their multipartite-entanglement frustration.",
    )
    parser.add_argument("--version", action="version", version=f"gaussmmes {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, forced_json in (("verify", False), ("oracle", True)):
        p = sub.add_parser(name, help="run the self-contained check battery")
        p.add_argument("--json", action="store_true", default=forced_json,
                       help="machine-readable report")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--samples", type=int, default=2000,
                       help="random states per thermal-floor configuration")
        p.add_argument("--wigner-cases", type=int, dest="wigner_cases", default=12,
                       help="one-mode quadrature cases (two-mode cases scale down)")
        p.set_defaults(func=cmd_verify)

    p = sub.add_parser("optimize", help="minimize chi at one excitation bound")
    p.add_argument("--excitations", type=float, help="excitation bound N (nonnegative real)")
    _add_optimizer_flags(p)
    p.set_defaults(func=None)

    p = sub.add_parser("scan", help="minimize chi over an N grid, emit CSV")
    p.add_argument("--grid", help="inclusive start:stop:step grid of N values")
    p.add_argument("--jsonl", help="also write full per-point results as JSON lines")
    p.add_argument("--no-warm-start", action="store_true",
                   help="do not seed each grid point from the previous optimum")
    _add_optimizer_flags(p)
    p.set_defaults(func=None)

    p = sub.add_parser("rerun", help="replay a run manifest")
    p.add_argument("manifest", help="manifest JSON written by optimize/scan")
    p.set_defaults(func=cmd_rerun)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        if args.command in ("optimize", "scan"):
            file_values = load_config_file(args.config) if args.config else {}
            if args.command == "optimize":
                if args.excitations is None:
                    parser.error("optimize requires --excitations")
                if args.excitations < 0:
                    parser.error("--excitations must be nonnegative")
                grid = (args.excitations,)
            else:
                grid_text = args.grid if args.grid is not None else file_values.get("N_grid")
                if grid_text is None:
                    parser.error("scan requires --grid start:stop:step")
                try:
                    grid = parse_grid(grid_text)
                except ValueError as exc:
                    parser.error(str(exc))
            try:
                config = build_experiment_config(args, file_values, grid)
                if args.command == "scan" and args.no_warm_start:
                    config = ExperimentConfig(**{**config.__dict__, "warm_start": False})
            except ValueError as exc:
                parser.error(str(exc))
            if args.command == "optimize":
                return run_optimize(config, args.out, args.manifest)
            return run_scan(config, args.out, args.jsonl, args.manifest)

        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
