#!/usr/bin/env python3
"""
Command-line driver: generate stable pairs, analyse them, verify Phi_* B^H = B
and run seeded suites.

Usage:
  python hitchin_spectral.py gen --seed 1 --r 2 --n 1 --out data/pairs/pair.json
  python hitchin_spectral.py analyze --input data/pairs/r2_n1_smooth.json
  python hitchin_spectral.py verify --input data/pairs/r2_n2_genus1.json [--inject-sign-fault]
  python hitchin_spectral.py suite --r 1-2 --n 1-2 --samples 5 --workers 4

Exit codes: 0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from dotenv import load_dotenv
from tqdm import tqdm

from .defm import (
    PairingConventionError,
    WindowInstabilityError,
    check_representative_independence,
    check_window_stability,
    cotangent_complex,
    duality_data,
    end_complex,
    euler_check,
    hyper_dims,
)
from .exact import rational_str, to_rational
from .hitchin import (
    HitchinPair,
    PoissonSection,
    UnstablePairError,
    endomorphism_check,
    is_stable,
    pair_from_json,
    pair_to_json,
    random_pair,
    random_poisson_section,
    require_stable,
)
from .poisson import commutation_data, linearity_check, moduli_point, skew_check, verify_theorem1
from .shared_utils import (
    PAIR_SCHEMA,
    PAIRS_DIR,
    REPORTS_DIR,
    THEOREM_REPORT_SCHEMA,
    InputError,
    load_json_file,
    setup_logging,
    validate_json,
    write_json,
    write_manifest,
)
from .spectral import (
    fitting_agreement,
    genus,
    genus_closed_form,
    moduli_dimension,
    normal_sections_dimension,
    phi,
    resultant_certificate,
    smoothness_certificate,
    spectral_curve,
)

load_dotenv()

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2

DEFAULT_SEED = int(os.getenv("HITCHIN_SEED", "1"))
DEFAULT_BOUND = int(os.getenv("HITCHIN_BOUND", "5"))
DEFAULT_MAX_TRIES = int(os.getenv("HITCHIN_MAX_TRIES", "200"))
DEFAULT_WINDOW_EXTRA = int(os.getenv("HITCHIN_WINDOW_EXTRA", "0"))
DEFAULT_WORKERS = int(os.getenv("HITCHIN_WORKERS", "1"))
PAIRING_TRIALS = 20


class SamplingExhaustedError(RuntimeError):
    """No certified stable pair within the retry bound."""


# ================================
# CONFIG
# ================================
@dataclass(frozen=True)
class RunConfig:
    command: str
    seed: int
    r_values: Tuple[int, ...]
    n_values: Tuple[int, ...]
    bound: int
    samples: int
    splitting: Optional[Tuple[int, ...]]
    sigma0: Optional[Tuple[str, ...]]
    max_tries: int
    window_extra: int
    inject_sign_fault: bool
    workers: int
    input_path: Optional[str]
    out_path: Optional[str]
    verbosity: int

    def report_config(self) -> Dict[str, Any]:
        """Deterministic part of the config echoed into reports."""
        out = asdict(self)
        for key in ("verbosity", "workers", "out_path", "input_path"):
            out.pop(key)
        out["r_values"] = list(self.r_values)
        out["n_values"] = list(self.n_values)
        return out


def parse_range(text: str) -> Tuple[int, ...]:
    """"2" -> (2,), "1-3" -> (1, 2, 3), "1,3" -> (1, 3), "" -> ()."""
    values: List[int] = []
    for part in filter(None, (p.strip() for p in str(text).split(","))):
        if "-" in part[1:]:
            lo, hi = (int(x) for x in part.split("-", 1))
            if hi < lo:
                raise ValueError(f"descending range {part!r}")
            values.extend(range(lo, hi + 1))
        else:
            values.append(int(part))
    return tuple(values)


def parse_int_list(text: Optional[str]) -> Optional[Tuple[int, ...]]:
    if text is None:
        return None
    return tuple(int(p) for p in text.split(",") if p.strip())


def parse_args(argv: Optional[List[str]] = None) -> RunConfig:
    p = argparse.ArgumentParser(description="Hitchin pairs on P^1, spectral sheaves and their Poisson structures.")
    p.add_argument("command", choices=["gen", "analyze", "verify", "suite"])
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="64-bit seed for the PCG64 generator")
    p.add_argument("--r", dest="r_values", default=None, help='Rank or range ("2", "1-3", "1,3")')
    p.add_argument("--n", dest="n_values", default=None, help="Twist N = O(n), n >= 1; same range syntax")
    p.add_argument("--bound", type=int, default=DEFAULT_BOUND, help="Coefficient bound B for random entries")
    p.add_argument("--samples", type=int, default=5, help="Samples per (r, n) grid point (suite)")
    p.add_argument("--splitting", default=None, help='Splitting type, e.g. "0,-1" (gen/verify)')
    p.add_argument("--sigma0", default=None, help='Coefficients of sigma0 in 1, z, ..., z^(n+2), e.g. "1,0,0,1"')
    p.add_argument("--max-tries", type=int, default=DEFAULT_MAX_TRIES, help="Rejection-sampling retry bound")
    p.add_argument("--window-extra", type=int, default=DEFAULT_WINDOW_EXTRA, help="Extra Cech degree margin")
    p.add_argument("--inject-sign-fault", action="store_true", help="Use s = -p^*sigma0 on the sheaf side")
    p.add_argument("--workers", type=int, default=DEFAULT_WORKERS, help="Suite worker processes")
    p.add_argument("--input", dest="input_path", default=None, help="Pair JSON (analyze/verify)")
    p.add_argument("--out", dest="out_path", default=None, help="Output JSON path")
    p.add_argument("-v", "--verbose", action="count", default=0, help="Increase verbosity (-v, -vv)")
    args = p.parse_args(argv)
    setup_logging(args.verbose)

    default_r = "1-2" if args.command == "suite" else "2"
    default_n = "1-2" if args.command == "suite" else "1"
    try:
        r_values = parse_range(args.r_values if args.r_values is not None else default_r)
        n_values = parse_range(args.n_values if args.n_values is not None else default_n)
        splitting = parse_int_list(args.splitting)
    except ValueError as e:
        p.error(f"bad integer list or range: {e}")
    if any(r < 1 for r in r_values):
        p.error("--r values must be >= 1")
    if any(n < 1 for n in n_values):
        p.error("--n values must be >= 1")
    if args.seed < 0:
        p.error("--seed must be >= 0")
    if args.samples < 1:
        p.error("--samples must be >= 1")
    if args.bound < 0 or args.max_tries < 1 or args.window_extra < 0 or args.workers < 1:
        p.error("--bound, --window-extra must be >= 0; --max-tries, --workers >= 1")
    if args.command in ("gen", "verify", "analyze") and args.input_path is None and (len(r_values) != 1 or len(n_values) != 1):
        p.error(f"{args.command} takes a single --r and --n")

    return RunConfig(
        command=args.command,
        seed=args.seed,
        r_values=r_values,
        n_values=n_values,
        bound=args.bound,
        samples=args.samples,
        splitting=splitting,
        sigma0=tuple(s.strip() for s in args.sigma0.split(",")) if args.sigma0 else None,
        max_tries=args.max_tries,
        window_extra=args.window_extra,
        inject_sign_fault=args.inject_sign_fault,
        workers=args.workers,
        input_path=args.input_path,
        out_path=args.out_path,
        verbosity=args.verbose,
    )


# ================================
# SAMPLING AND LOADING
# ================================
def point_rng(seed: int, r: int, n: int, k: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, r, n, k])))


def sample_stable_pair(
    seed: int,
    r: int,
    n: int,
    bound: int,
    max_tries: int,
    k: int = 0,
    splitting: Optional[Sequence[int]] = None,
) -> Tuple[HitchinPair, PoissonSection, int]:
    """Rejection sampling until the stability certificate holds; returns (pair, sigma0, attempts)."""
    splitting = tuple(splitting) if splitting is not None else (0,) * r
    if len(splitting) != r:
        raise InputError(f"splitting {splitting} has rank {len(splitting)}, expected {r}")
    rng = point_rng(seed, r, n, k)
    for attempt in range(1, max_tries + 1):
        pair = random_pair(rng, splitting, n, bound)
        if is_stable(pair).is_stable:
            sigma = random_poisson_section(rng, n, bound)
            logging.info("Stable pair r=%d n=%d after %d attempt(s)", r, n, attempt)
            return pair, sigma, attempt
    raise SamplingExhaustedError(f"no stable pair for r={r}, n={n}, B={bound} within {max_tries} tries")


def sigma_from_config(cfg: RunConfig, n: int) -> Optional[PoissonSection]:
    if cfg.sigma0 is None:
        return None
    try:
        return PoissonSection(n, tuple(to_rational(c) for c in cfg.sigma0))
    except ValueError as e:
        raise InputError(f"--sigma0: {e}") from e


def load_pair(path: str) -> Tuple[HitchinPair, Optional[PoissonSection]]:
    obj = load_json_file(path)
    validate_json(obj, PAIR_SCHEMA, what=path)
    try:
        return pair_from_json(obj)
    except ValueError as e:
        raise InputError(f"❌ {path}: {e}") from e


def resolve_pair(cfg: RunConfig) -> Tuple[HitchinPair, PoissonSection]:
    """Pair from --input, or generated from --seed/--r/--n; sigma0 from flag, file or the generator."""
    if cfg.input_path:
        pair, sigma = load_pair(cfg.input_path)
        if sigma is None:
            sigma = random_poisson_section(point_rng(cfg.seed, pair.rank, pair.n), pair.n, cfg.bound)
    else:
        pair, sigma, _ = sample_stable_pair(
            cfg.seed, cfg.r_values[0], cfg.n_values[0], cfg.bound, cfg.max_tries, splitting=cfg.splitting
        )
    override = sigma_from_config(cfg, pair.n)
    return pair, override or sigma


# ================================
# ANALYSIS
# ================================
def analyze_pair(pair: HitchinPair, window_extra: int = 0) -> Dict[str, Any]:
    r, n = pair.rank, pair.n
    curve = spectral_curve(pair)
    smooth = smoothness_certificate(curve)
    resultants = resultant_certificate(curve)
    stability = is_stable(pair)
    rep = phi(pair, check_stable=False)
    tangent, cotangent = end_complex(pair), cotangent_complex(pair)
    dims = hyper_dims(tangent)

    window_dims: List[int] = []
    window_ok = True
    try:
        window_dims = check_window_stability(tangent, window_extra)
        check_window_stability(cotangent, window_extra)
    except WindowInstabilityError as e:
        logging.error("%s", e)
        window_ok = False

    # duality_data raises on a dimension mismatch or a degenerate pairing
    try:
        duality_data(tangent, cotangent)
        pairing_ok = True
    except PairingConventionError as e:
        logging.error("%s", e)
        pairing_ok = False

    g = genus(curve)
    checks = {
        "euler_characteristic": rep.euler_characteristic() == pair.degree + r,
        "genus_formula": g == genus_closed_form(r, n),
        "fitting_agreement": fitting_agreement(pair),
        "hyper_euler": euler_check(tangent),
        "window_stable": window_ok,
        "serre_duality": pairing_ok,
    }
    if stability.is_stable:
        checks["dims"] = dims == (1, moduli_dimension(r, n), 0)
        checks["endomorphisms"] = endomorphism_check(pair) == 1
        checks["moduli_dimension"] = g + normal_sections_dimension(curve) == moduli_dimension(r, n)
    if smooth.value == "Smooth":
        checks["discriminant_nonzero"] = resultants.discriminants_nonzero
    if resultants.no_common_root:
        checks["resultant_implies_smooth"] = smooth.value == "Smooth"

    return {
        "input": pair_to_json(pair),
        "rank": r,
        "n": n,
        "degree": pair.degree,
        "euler_characteristic": rep.euler_characteristic(),
        "genus": g,
        "spectral_curve": curve.to_json(),
        "smoothness": smooth.value,
        "resultants": {
            "discriminants_nonzero": resultants.discriminants_nonzero,
            "no_common_root": resultants.no_common_root,
        },
        "stability": stability.value,
        "dims": {"H0": dims[0], "H1": dims[1], "H2": dims[2]},
        "window_dims": window_dims,
        "normal_sections": normal_sections_dimension(curve),
        "serre_pairing_det_nonzero": pairing_ok,
        "checks": checks,
        "passed": all(checks.values()),
    }


def verify_pair(pair: HitchinPair, sigma: PoissonSection, cfg: RunConfig) -> Dict[str, Any]:
    require_stable(pair)
    report = verify_theorem1(pair, sigma, inject_sign_fault=cfg.inject_sign_fault)
    point = moduli_point(pair)
    commutation = commutation_data(pair, sigma)
    rng = point_rng(cfg.seed, pair.rank, pair.n, 10_000)
    trials = check_representative_independence(point.duality, rng, trials=PAIRING_TRIALS)
    other = random_poisson_section(rng, pair.n, cfg.bound)
    window_dims = check_window_stability(point.tangent, cfg.window_extra)
    skew = skew_check(pair, sigma)
    linear = linearity_check(pair, sigma, other)

    checks = {
        "theorem": report.passed,
        "lemma_adjoint": report.adjoint_ok,
        "skew": skew,
        "hamiltonians_commute": commutation.max_abs == 0,
        "linearity": linear,
    }
    return {
        "input": pair_to_json(pair, sigma),
        "fault_injected": cfg.inject_sign_fault,
        "fault_detectable": report.detectable,
        "dims": {"H1": point.dim, "window": window_dims},
        "hitchin_poisson": report.hitchin.to_strings(),
        "sheaf_poisson": report.sheaf.to_strings(),
        "sheaf_poisson_raw": report.sheaf_raw.to_strings(),
        "phi_tangent": report.phi_tangent.to_strings(),
        "phi_cotangent": report.phi_cotangent.to_strings(),
        "difference": report.difference.to_strings(),
        "poisson_rank": commutation.poisson_rank,
        "casimir_count": commutation.casimir_count,
        "max_bracket": rational_str(commutation.max_abs),
        "pairing_trials": trials,
        "checks": checks,
        "passed": all(checks.values()),
    }


# ================================
# COMMANDS
# ================================
def cmd_gen(cfg: RunConfig) -> int:
    r, n = cfg.r_values[0], cfg.n_values[0]
    pair, sigma, attempts = sample_stable_pair(cfg.seed, r, n, cfg.bound, cfg.max_tries, splitting=cfg.splitting)
    sigma = sigma_from_config(cfg, n) or sigma
    out = cfg.out_path or os.path.join(PAIRS_DIR, f"pair_r{r}_n{n}_seed{cfg.seed}.json")
    payload = write_json(out, pair_to_json(pair, sigma))
    write_manifest(out, cfg.report_config(), payload, {"attempts": attempts})
    print(f"✅ Stable pair (r={r}, n={n}) written to {out} after {attempts} attempt(s)")
    return EXIT_OK


def cmd_analyze(cfg: RunConfig) -> int:
    if cfg.input_path:
        pair, _ = load_pair(cfg.input_path)
    else:
        pair, _ = resolve_pair(cfg)
    start = time.perf_counter()
    result = analyze_pair(pair, cfg.window_extra)
    elapsed = time.perf_counter() - start
    out = cfg.out_path or os.path.join(REPORTS_DIR, "analysis.json")
    payload = write_json(out, result)
    write_manifest(out, cfg.report_config(), payload, {"timing_seconds": round(elapsed, 3)})
    dims = result["dims"]
    mark = "✅" if result["passed"] else "❌"
    print(f"{mark} genus={result['genus']} dims=({dims['H0']}, {dims['H1']}, {dims['H2']}) "
          f"stability={result['stability']} -> {out}")
    if not result["passed"]:
        failed = [k for k, v in result["checks"].items() if not v]
        logging.error("Failed checks: %s", ", ".join(failed))
        return EXIT_FAIL
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    pair, sigma = resolve_pair(cfg)
    start = time.perf_counter()
    result = verify_pair(pair, sigma, cfg)
    elapsed = time.perf_counter() - start
    validate_json(result, THEOREM_REPORT_SCHEMA, what="theorem report")
    out = cfg.out_path or os.path.join(REPORTS_DIR, "verify.json")
    payload = write_json(out, result)
    write_manifest(out, cfg.report_config(), payload, {"timing_seconds": round(elapsed, 3)})
    if result["passed"]:
        print(f"✅ Phi_* B^H = B at r={pair.rank}, n={pair.n} (dim {result['dims']['H1']}) -> {out}")
        return EXIT_OK
    failed = [k for k, v in result["checks"].items() if not v]
    print(f"❌ Verification failed ({', '.join(failed)}) -> {out}")
    return EXIT_FAIL


@dataclass(frozen=True)
class PointTask:
    seed: int
    r: int
    n: int
    k: int
    bound: int
    max_tries: int
    window_extra: int
    inject_sign_fault: bool


def run_point(task: PointTask) -> Tuple[Dict[str, Any], float]:
    """One suite point: sample, analyse, verify. Returns (row, seconds)."""
    start = time.perf_counter()
    row: Dict[str, Any] = {"r": task.r, "n": task.n, "sample": task.k}
    try:
        pair, sigma, attempts = sample_stable_pair(task.seed, task.r, task.n, task.bound, task.max_tries, task.k)
        cfg = RunConfig(
            command="suite", seed=task.seed, r_values=(task.r,), n_values=(task.n,), bound=task.bound,
            samples=1, splitting=None, sigma0=None, max_tries=task.max_tries, window_extra=task.window_extra,
            inject_sign_fault=task.inject_sign_fault, workers=1, input_path=None, out_path=None, verbosity=0,
        )
        analysis = analyze_pair(pair, task.window_extra)
        verification = verify_pair(pair, sigma, cfg)
        row.update({
            "attempts": attempts,
            "genus": analysis["genus"],
            "H0": analysis["dims"]["H0"],
            "H1": analysis["dims"]["H1"],
            "H2": analysis["dims"]["H2"],
            "poisson_rank": verification["poisson_rank"],
            "casimirs": verification["casimir_count"],
            "analysis_passed": analysis["passed"],
            "theorem_passed": verification["checks"]["theorem"],
            "passed": analysis["passed"] and verification["passed"],
            "error": None,
            "input": verification["input"],
        })
    except Exception as e:  # a failing point must not take the suite down
        logging.exception("Suite point r=%d n=%d k=%d failed", task.r, task.n, task.k)
        row.update({"passed": False, "error": f"{type(e).__name__}: {e}"})
    return row, time.perf_counter() - start


def cmd_suite(cfg: RunConfig) -> int:
    tasks = [
        PointTask(cfg.seed, r, n, k, cfg.bound, cfg.max_tries, cfg.window_extra, cfg.inject_sign_fault)
        for r in cfg.r_values for n in cfg.n_values for k in range(cfg.samples)
    ]
    if not tasks:
        logging.warning("Empty grid: nothing to run")
        print("⚠️ Empty grid, nothing to verify")

    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(tqdm(pool.map(run_point, tasks), total=len(tasks), desc="Suite"))
    else:
        results = [run_point(t) for t in tqdm(tasks, desc="Suite", disable=not tasks)]

    rows = [row for row, _ in results]
    timings = [round(sec, 3) for _, sec in results]
    all_passed = all(row["passed"] for row in rows)
    out = cfg.out_path or os.path.join(REPORTS_DIR, "suite.json")
    payload = write_json(out, {"config": cfg.report_config(), "points": rows, "all_passed": all_passed})
    write_manifest(out, cfg.report_config(), payload, {"timing_seconds": timings})

    if rows:
        df = pd.DataFrame([{k: v for k, v in row.items() if k != "input"} for row in rows])
        df.to_csv(os.path.splitext(out)[0] + ".csv", index=False)
        print(df.to_string(index=False))
    mark = "✅" if all_passed else "❌"
    print(f"{mark} {sum(r['passed'] for r in rows)}/{len(rows)} points passed -> {out}")
    return EXIT_OK if all_passed else EXIT_FAIL


COMMANDS = {"gen": cmd_gen, "analyze": cmd_analyze, "verify": cmd_verify, "suite": cmd_suite}


# ================================
# ENTRY POINT
# ================================
def main(argv: Optional[List[str]] = None) -> int:
    try:
        cfg = parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_INPUT
    logging.info("Config: %s", cfg)

    try:
        return COMMANDS[cfg.command](cfg)
    except (InputError, SamplingExhaustedError, UnstablePairError) as e:
        logging.error("%s", e)
        print(f"❌ {e}")
        return EXIT_INPUT
    except Exception as e:
        logging.exception("Unexpected failure in %s", cfg.command)
        print(f"❌ {type(e).__name__}: {e}")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
