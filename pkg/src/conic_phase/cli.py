"""Command-line orchestrator: reproduce every prediction at desk scale.

Subcommands
    exact-table   exact (or log-space) face ratios and Grassmann angles
    thresholds    weak/strong threshold curves over a delta grid
    convergence   exact ratios against their limiting values along a regime
    simulate      Monte Carlo face counts and angles with exact references
    duality       polar tessellation cells against conditioned-cone values

All output is plot-ready CSV or JSON with a fixed 17-significant-digit
float format and deterministic row order: identical invocations produce
byte-identical files.

Exit codes: 0 success, 2 domain error, 3 solver or degeneracy error,
4 acceptance probability too small.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

from . import asymptotics, exact
from .errors import AcceptanceTooSmallError, ConicPhaseError, DomainError
from .sampling import SampleConfig, duality_check, estimate_grassmann, simulate_face_counts

EXACT_LIMIT_DEFAULT = 200


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _parse_int_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part]
    except ValueError as err:
        raise DomainError(f"expected a comma-separated integer list, got {text!r}") from err
    if not values:
        raise DomainError("empty parameter list")
    return values


def _parse_grid(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise DomainError(f"expected a:b:step, got {text!r}")
    try:
        a, b, step = (float(p) for p in parts)
    except ValueError as err:
        raise DomainError(f"non-numeric grid bounds in {text!r}") from err
    if step <= 0 or b < a:
        raise DomainError(f"need a <= b and step > 0 in {text!r}")
    values = []
    i = 0
    while True:
        x = a + i * step
        if x > b + 1e-12:
            break
        values.append(x)
        i += 1
    return values


def _parse_distribution(text: str) -> tuple[str, tuple[float, ...] | None]:
    if text == "gaussian":
        return "gaussian", None
    if text == "sphere":
        return "uniform_sphere", None
    if text.startswith("aniso:"):
        try:
            scales = tuple(float(s) for s in text[len("aniso:"):].split(","))
        except ValueError as err:
            raise DomainError(f"bad scale list in {text!r}") from err
        return "anisotropic_gaussian", scales
    raise DomainError(f"unknown distribution {text!r} (gaussian | sphere | aniso:SCALES)")


def _sample_counts(d: int, n_over_d: float) -> int:
    n = round(n_over_d * d)
    if n < d:
        raise DomainError(f"n = round({n_over_d} * {d}) = {n} is below d")
    return n


def _write_output(rows: list[dict], columns: list[str], args, parameters: dict) -> None:
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row.get(col)) for col in columns])
        text = buf.getvalue()
    else:
        payload = {
            "command": args.command,
            "parameters": parameters,
            "rows": rows,
            "metadata": {"seed": getattr(args, "seed", None), "columns": columns},
        }
        text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _ratio_pair(d: int, n: int, k: int, exact_limit: int) -> tuple[float, float, str]:
    if d <= exact_limit:
        face = float(exact.expected_face_ratio(d, n, k))
        grassmann = float(exact.expected_grassmann_angle(d, n, k))
        return face, grassmann, "exact"
    ratios = exact.log_space_ratios(d, n, k)
    return ratios.face_ratio.to_float(), ratios.grassmann.to_float(), "log_space"


def _cmd_exact_table(args) -> None:
    ds = _parse_int_list(args.d)
    ks = _parse_int_list(args.k)
    rows = []
    for d in ds:
        n = _sample_counts(d, args.n_over_d)
        for k in ks:
            if k > d - 1:
                continue
            face, grassmann, method = _ratio_pair(d, n, k, args.exact_limit)
            rows.append(
                {
                    "d": d,
                    "n": n,
                    "k": k,
                    "face_ratio": face,
                    "grassmann_angle": grassmann,
                    "method": method,
                }
            )
    _write_output(
        rows,
        ["d", "n", "k", "face_ratio", "grassmann_angle", "method"],
        args,
        {"d": ds, "n_over_d": args.n_over_d, "k": ks, "exact_limit": args.exact_limit},
    )


def _cmd_thresholds(args) -> None:
    grid = _parse_grid(args.delta_grid)
    rows = []
    for delta in grid:
        result = asymptotics.strong_threshold(delta)
        rows.append(
            {
                "delta": delta,
                "rho_weak": asymptotics.weak_threshold(delta),
                "rho_strong": result.root,
                "exponent_at_root": result.residual,
                "iterations": result.iterations,
            }
        )
    _write_output(
        rows,
        ["delta", "rho_weak", "rho_strong", "exponent_at_root", "iterations"],
        args,
        {"delta_grid": args.delta_grid},
    )


def _cmd_convergence(args) -> None:
    ds = _parse_int_list(args.d)
    delta = 1.0 / args.n_over_d
    rows = []
    if (args.k is None) == (args.rho is None):
        raise DomainError("convergence needs exactly one of --k or --rho")
    if args.k is not None:
        ks = _parse_int_list(args.k)
        regimes = [(k, asymptotics.ThresholdPoint(delta, 0.0), k) for k in ks]
    else:
        point = asymptotics.ThresholdPoint(delta, args.rho)
        regimes = [(None, point, asymptotics.PROPORTIONAL)]
    for d in ds:
        n = _sample_counts(d, args.n_over_d)
        for fixed_k, point, mode in regimes:
            k = fixed_k if fixed_k is not None else max(1, round(args.rho * d))
            if k > d - 1:
                continue
            face, grassmann, method = _ratio_pair(d, n, k, args.exact_limit)
            face_limit = asymptotics.predicted_face_limit(point, mode)
            grassmann_limit = asymptotics.predicted_grassmann_limit(point, mode)
            rows.append(
                {
                    "d": d,
                    "n": n,
                    "k": k,
                    "face_ratio": face,
                    "face_limit": face_limit.value,
                    "grassmann_angle": grassmann,
                    "grassmann_limit": grassmann_limit.value,
                    "sqrt_d_face_gap": math.sqrt(d) * (1.0 - face),
                    "sqrt_d_angle": math.sqrt(d) * grassmann / 2.0,
                    "rate_limit": asymptotics.critical_rate(k) if fixed_k is not None else None,
                    "gaussian_approx": asymptotics.gaussian_ratio_approximation(d, n, k)
                    if k < d < n
                    else None,
                    "method": method,
                }
            )
    _write_output(
        rows,
        [
            "d",
            "n",
            "k",
            "face_ratio",
            "face_limit",
            "grassmann_angle",
            "grassmann_limit",
            "sqrt_d_face_gap",
            "sqrt_d_angle",
            "rate_limit",
            "gaussian_approx",
            "method",
        ],
        args,
        {"d": ds, "n_over_d": args.n_over_d, "k": args.k, "rho": args.rho},
    )


def _build_config(args, d: int, n: int) -> SampleConfig:
    distribution, scales = _parse_distribution(args.dist)
    return SampleConfig(
        dimension=d,
        sample_count=n,
        distribution=distribution,
        scales=scales,
        mode=args.mode,
        seed=args.seed,
    )


def _cmd_simulate(args) -> None:
    d = int(args.d)
    n = _sample_counts(d, args.n_over_d)
    ks = _parse_int_list(args.k)
    config = _build_config(args, d, n)
    workers = args.workers or os.cpu_count() or 1

    rows = []
    report = simulate_face_counts(config, ks, args.trials, workers=workers)
    for fs in report.face_stats:
        rows.append(
            {
                "quantity": "face_ratio",
                "k": fs.k,
                "subsets": fs.subsets,
                "estimate": fs.mean_ratio,
                "se": fs.se_ratio,
                "exact": fs.exact_ratio,
                "z_score": fs.z_score,
                "complete_fraction": fs.complete_fraction,
                "trials": report.trials,
                "failed_trials": report.failed_trials,
                "acceptance_rate": report.acceptance_rate,
                "expected_acceptance": report.expected_acceptance,
            }
        )
    if config.mode == "conditioned":
        for k in ks:
            angle_report = estimate_grassmann(
                config, k, args.trials, subspaces_per_trial=args.subspaces, workers=workers
            )
            st = angle_report.angle_stats[0]
            rows.append(
                {
                    "quantity": "grassmann_angle",
                    "k": st.k,
                    "subsets": None,
                    "estimate": st.estimate,
                    "se": st.se,
                    "exact": st.exact,
                    "z_score": st.z_score,
                    "complete_fraction": None,
                    "trials": angle_report.trials,
                    "failed_trials": angle_report.failed_trials,
                    "acceptance_rate": angle_report.acceptance_rate,
                    "expected_acceptance": angle_report.expected_acceptance,
                }
            )
    _write_output(
        rows,
        [
            "quantity",
            "k",
            "subsets",
            "estimate",
            "se",
            "exact",
            "z_score",
            "complete_fraction",
            "trials",
            "failed_trials",
            "acceptance_rate",
            "expected_acceptance",
        ],
        args,
        {
            "d": d,
            "n": n,
            "k": ks,
            "trials": args.trials,
            "mode": args.mode,
            "dist": args.dist,
            "subspaces": args.subspaces,
        },
    )


def _cmd_duality(args) -> None:
    d = int(args.d)
    n = _sample_counts(d, args.n_over_d)
    ks = _parse_int_list(args.k) if args.k else None
    config = _build_config(args, d, n)
    workers = args.workers or os.cpu_count() or 1
    report = duality_check(config, n, args.trials, k_list=ks, workers=workers)
    rows = []
    for fs in report.face_stats:
        rows.append(
            {
                "k": fs.k,
                "subsets": fs.subsets,
                "mean_ratio": fs.mean_ratio,
                "se": fs.se_ratio,
                "exact": fs.exact_ratio,
                "z_score": fs.z_score,
                "complete_fraction": fs.complete_fraction,
                "trials": report.trials,
                "failed_trials": report.failed_trials,
            }
        )
    _write_output(
        rows,
        [
            "k",
            "subsets",
            "mean_ratio",
            "se",
            "exact",
            "z_score",
            "complete_fraction",
            "trials",
            "failed_trials",
        ],
        args,
        {"d": d, "n": n, "k": ks, "trials": args.trials, "dist": args.dist},
    )


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--out", default=None, help="output path (default: stdout)")


def _add_sampling_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--trials", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=None, help="default: machine parallelism")
    parser.add_argument("--mode", choices=("conditioned", "unconditioned"), default="conditioned")
    parser.add_argument("--dist", default="gaussian", help="gaussian | sphere | aniso:SCALES")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conic-phase",
        description="Exact, asymptotic and Monte Carlo face statistics of conditioned random cones.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact-table", help="exact face ratios and Grassmann angles")
    p.add_argument("--d", required=True, help="comma-separated dimensions")
    p.add_argument("--n-over-d", type=float, required=True, dest="n_over_d")
    p.add_argument("--k", required=True, help="comma-separated face indices")
    p.add_argument("--exact-limit", type=int, default=EXACT_LIMIT_DEFAULT, dest="exact_limit",
                   help="largest d computed with exact rationals (log-space beyond)")
    _add_common(p)
    p.set_defaults(func=_cmd_exact_table, seed=None)

    p = sub.add_parser("thresholds", help="weak and strong threshold curves")
    p.add_argument("--delta-grid", required=True, dest="delta_grid", help="a:b:step in (1/2, 1)")
    _add_common(p)
    p.set_defaults(func=_cmd_thresholds, seed=None)

    p = sub.add_parser("convergence", help="exact ratios against limit predictions")
    p.add_argument("--d", required=True)
    p.add_argument("--n-over-d", type=float, required=True, dest="n_over_d")
    p.add_argument("--k", default=None, help="fixed face indices")
    p.add_argument("--rho", type=float, default=None, help="proportional regime k ~ rho*d")
    p.add_argument("--exact-limit", type=int, default=EXACT_LIMIT_DEFAULT, dest="exact_limit")
    _add_common(p)
    p.set_defaults(func=_cmd_convergence, seed=None)

    p = sub.add_parser("simulate", help="Monte Carlo face counts and Grassmann angles")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n-over-d", type=float, required=True, dest="n_over_d")
    p.add_argument("--k", required=True)
    p.add_argument("--subspaces", type=int, default=1, help="subspace samples per trial")
    _add_sampling_common(p)
    _add_common(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("duality", help="polar tessellation cells vs conditioned-cone values")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n-over-d", type=float, required=True, dest="n_over_d")
    p.add_argument("--k", default=None)
    _add_sampling_common(p)
    _add_common(p)
    p.set_defaults(func=_cmd_duality)

    return parser


def _error_record(err: Exception) -> str:
    return json.dumps({"error": {"type": type(err).__name__, "message": str(err)}})


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except DomainError as err:  # includes AtThresholdError
        print(_error_record(err), file=sys.stderr)
        return 2
    except AcceptanceTooSmallError as err:
        print(_error_record(err), file=sys.stderr)
        return 4
    except ConicPhaseError as err:
        # solver breakdown, degeneracy, sampling exhaustion, broken invariants
        print(_error_record(err), file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
