"""Command-line front end: exact calculators and experiment sweeps.

Subcommands: pe, hist, gains, sweep, simulate, claim1. Scalar reports are
JSON; sweep-style outputs default to CSV with 17-significant-digit floats.
Every run is deterministic given its full flag set (including --seed), and
artifacts written with --out carry a manifest (embedded for JSON, a
``<out>.manifest.json`` sidecar for CSV) sufficient to re-run them.

Exit codes: 0 success, 2 usage/parse error, 3 size guard, 4 input
inconsistency (e.g. a policy table sized for a different system).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .decision import policy_table, policy_table_from_json, DecisionPolicy
from .error_analysis import (
    ENUMERATION_LIMIT,
    METHOD_CLOSED_FORM,
    ErrorReport,
    bias_sweep,
    exact_error_probability,
    extreme_bias_floor,
    fully_biased_error,
    identical_error_probability,
    log_identical_error_probability,
    sweep_to_csv,
)
from .gains import claim1_check, convergence_table
from .model import (
    Prior,
    SizeGuardError,
    SystemSpec,
    canonicalize,
    make_fully_biased_system,
    make_unbiased_system,
    random_system_with_rates,
)
from .montecarlo import SimConfig, simulate

CONCAVITY_TOL = 1e-9


class _InconsistentInput(Exception):
    """Structurally valid inputs that do not fit together (exit code 4)."""


def _parse_float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _manifest(args: argparse.Namespace) -> dict:
    params = {}
    for key, value in sorted(vars(args).items()):
        if key in ("func", "command"):
            continue
        if isinstance(value, Path):
            value = str(value)
        params[key] = value
    return {
        "command": args.command,
        "version": __version__,
        "seed": getattr(args, "seed", None),
        "params": params,
    }


def _write_text(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(obj: dict, args: argparse.Namespace) -> None:
    obj["manifest"] = _manifest(args)
    _write_text(json.dumps(obj, indent=2) + "\n", args.out)


def _emit_csv(text: str, args: argparse.Namespace, extra: dict | None = None) -> None:
    _write_text(text, args.out)
    if args.out:
        manifest = _manifest(args)
        if extra:
            manifest["summary"] = extra
        Path(args.out + ".manifest.json").write_text(
            json.dumps(manifest, indent=2) + "\n"
        )


def _add_system_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--spec", help="path to a system JSON file")
    sub.add_argument("--n", type=int, help="number of channels")
    sub.add_argument("--rho0", type=float, help="prior probability of bit 0")
    sub.add_argument("--alpha", help="comma-separated alpha_i list")
    sub.add_argument("--beta", help="comma-separated beta_i list")
    sub.add_argument(
        "--unbiased-r", type=float, help="build n identical unbiased channels"
    )
    sub.add_argument(
        "--fully-biased-r", type=float, help="build n identical S-channels"
    )


def _system_from_args(args: argparse.Namespace) -> SystemSpec:
    if args.spec:
        return SystemSpec.from_json(Path(args.spec).read_text())
    if args.n is None or args.rho0 is None:
        raise ValueError("need --spec, or --n and --rho0 with channel flags")
    prior = Prior.from_rho0(args.rho0)
    if args.unbiased_r is not None:
        return make_unbiased_system(args.n, prior, args.unbiased_r)
    if args.fully_biased_r is not None:
        return make_fully_biased_system(
            args.n, prior, np.full(args.n, args.fully_biased_r)
        )
    if args.alpha is None or args.beta is None:
        raise ValueError("need --alpha and --beta (or a rate shorthand)")
    alphas = _parse_float_list(args.alpha)
    betas = _parse_float_list(args.beta)
    if len(alphas) != args.n or len(betas) != args.n:
        raise ValueError("--alpha/--beta lengths must match --n")
    return SystemSpec.from_dict(
        {"n": args.n, "rho0": args.rho0, "alpha": alphas, "beta": betas}
    )


def _best_error_report(system: SystemSpec) -> ErrorReport:
    """Pick the cheapest exact route for a canonical system."""
    if np.any(system.rates() == 0.0):
        # a zero-rate channel relays the bit perfectly at any n
        return ErrorReport(0.0, -math.inf, METHOD_CLOSED_FORM)
    if all(c.is_s_channel for c in system.channels):
        return fully_biased_error(system.n, system.prior, system.rates())
    first = system.channels[0]
    identical = all(c == first for c in system.channels)
    if identical and system.n <= 1000:
        return identical_error_probability(
            system.n, system.prior, first.alpha, first.beta
        )
    if identical and first.is_unbiased:
        return log_identical_error_probability(system.n, system.prior, first.alpha)
    if system.n <= ENUMERATION_LIMIT:
        return exact_error_probability(system)
    raise SizeGuardError(
        f"no exact route for this system at n={system.n} "
        f"(enumeration capped at {ENUMERATION_LIMIT})"
    )


def _cmd_pe(args: argparse.Namespace) -> int:
    system = _system_from_args(args)
    canonical, _ = canonicalize(system)
    report = _best_error_report(canonical)
    floor = extreme_bias_floor(canonical.prior, canonical.rates())
    _emit_json(
        {
            "p_error": report.p_error,
            "log_p_error": report.log_p_error,
            "method": report.method,
            "extreme_bias_floor": floor,
            "floor_condition_holds": bool(floor <= canonical.prior.rho1),
        },
        args,
    )
    return 0


def _cmd_hist(args: argparse.Namespace) -> int:
    if args.n > 12:
        raise SizeGuardError(f"histogram command capped at n=12, got n={args.n}")
    if args.samples < 1:
        raise ValueError("samples must be >= 1")
    prior = Prior.from_rho0(args.rho0)
    rates = np.full(args.n, args.r)
    values = np.empty(args.samples)
    for i in range(args.samples):
        system = random_system_with_rates(args.n, prior, rates, seed=args.seed + i)
        values[i] = exact_error_probability(system).p_error

    fb = fully_biased_error(args.n, prior, rates).p_error
    ub = identical_error_probability(args.n, prior, args.r, args.r).p_error
    lo, hi = fb, prior.rho1
    if hi - lo < 1e-15:
        hi = lo + 1e-15
    edges = np.linspace(lo, hi, args.bins + 1)
    counts, _ = np.histogram(np.clip(values, lo, hi), bins=edges)
    summary = {
        "min": float(values.min()),
        "max": float(values.max()),
        "fully_biased": fb,
        "unbiased": ub,
    }

    if args.format == "json":
        _emit_json(
            {
                "bin_edges": [float(e) for e in edges],
                "counts": [int(c) for c in counts],
                **summary,
            },
            args,
        )
    else:
        lines = ["bin_left,bin_right,count"]
        for j in range(args.bins):
            lines.append(f"{edges[j]:.17g},{edges[j + 1]:.17g},{counts[j]}")
        _emit_csv("\n".join(lines) + "\n", args, extra=summary)
    return 0


def _cmd_gains(args: argparse.Namespace) -> int:
    if args.n_max < 2:
        raise ValueError("--n-max must be >= 2")
    n_values = list(range(2, args.n_max + 1))
    records = []
    for rho0 in _parse_float_list(args.rho0_list):
        prior = Prior.from_rho0(rho0)
        for r in _parse_float_list(args.r_list):
            for row in convergence_table(prior, r, n_values):
                records.append((rho0, r, row))

    if args.format == "json":
        _emit_json(
            {
                "rows": [
                    {
                        "rho0": rho0,
                        "r": r,
                        "n": row.n,
                        "rate_exact": row.rate_exact,
                        "rate_lower": row.rate_lower,
                        "rate_upper": row.rate_upper,
                        "rate_asymptotic": row.rate_asymptotic,
                    }
                    for rho0, r, row in records
                ]
            },
            args,
        )
    else:
        lines = ["rho0,r,n,rate_exact,rate_lower,rate_upper,rate_asymptotic"]
        for rho0, r, row in records:
            lines.append(
                f"{rho0:.17g},{r:.17g},{row.n},{row.rate_exact:.17g},"
                f"{row.rate_lower:.17g},{row.rate_upper:.17g},"
                f"{row.rate_asymptotic:.17g}"
            )
        _emit_csv("\n".join(lines) + "\n", args)
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    system = _system_from_args(args)
    canonical, _ = canonicalize(system)
    sweep = bias_sweep(canonical, args.k, args.grid)
    worst = sweep.max_positive_second_difference()
    verdict = (
        f"concave (max second diff <= {CONCAVITY_TOL:g})"
        if worst <= CONCAVITY_TOL
        else f"concavity violated (max second diff {worst:.3e})"
    )
    concavity = {
        "max_positive_second_difference": worst,
        "verdict": verdict,
        "local_max_alpha": sweep.local_max_alpha,
        "local_max_row": sweep.local_max_index,
    }
    if args.format == "json":
        _emit_json(
            {
                "channel_index": sweep.channel_index,
                "alpha_k": [float(a) for a in sweep.alpha_grid],
                "beta_k": [float(b) for b in sweep.beta_grid],
                "p_error": [float(p) for p in sweep.p_error_at],
                "concavity": concavity,
            },
            args,
        )
    else:
        _emit_csv(sweep_to_csv(sweep), args, extra=concavity)
        if args.out:
            # Keep the verdict visible even when the CSV went to a file.
            print(verdict)
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    system = _system_from_args(args)
    if args.policy:
        n, table = policy_table_from_json(Path(args.policy).read_text())
        if n != system.n:
            raise _InconsistentInput(
                f"policy table is for n={n} but the system has n={system.n}"
            )
        policy = DecisionPolicy.from_table(system, table)
    else:
        policy = policy_table(system)
    config = SimConfig(trials=args.trials, seed=args.seed, system=system)
    result = simulate(config, policy, workers=args.workers)
    _emit_json(result.to_json_dict(), args)
    return 0


def _cmd_claim1(args: argparse.Namespace) -> int:
    if args.m_max < 1:
        raise ValueError("--m-max must be >= 1")
    rows = [(m, *claim1_check(m)) for m in range(1, args.m_max + 1)]
    if args.format == "json":
        _emit_json(
            {
                "rows": [
                    {"m": m, "inequality": ineq, "product_identity": prod}
                    for m, ineq, prod in rows
                ],
                "all_hold": all(i and p for _, i, p in rows),
            },
            args,
        )
    else:
        lines = ["m,inequality,product_identity"]
        for m, ineq, prod in rows:
            lines.append(f"{m},{str(ineq).lower()},{str(prod).lower()}")
        _emit_csv("\n".join(lines) + "\n", args)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="biasfuse",
        description="exact error calculators and experiments for biased binary relays",
    )
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="write output to this path instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    subs = parser.add_subparsers(dest="command", required=True)

    pe = subs.add_parser("pe", parents=[common], help="minimum error probability")
    _add_system_flags(pe)
    pe.set_defaults(func=_cmd_pe)

    hist = subs.add_parser(
        "hist", parents=[common], help="error histogram over random fixed-rate systems"
    )
    hist.add_argument("--n", type=int, required=True)
    hist.add_argument("--rho0", type=float, required=True)
    hist.add_argument("--r", type=float, required=True)
    hist.add_argument("--samples", type=int, required=True)
    hist.add_argument("--bins", type=int, default=40)
    hist.set_defaults(func=_cmd_hist)

    gains = subs.add_parser(
        "gains", parents=[common], help="normalized gain exponents and bounds"
    )
    gains.add_argument("--rho0-list", required=True, help="comma-separated rho0 values")
    gains.add_argument("--r-list", required=True, help="comma-separated rates")
    gains.add_argument("--n-max", type=int, required=True)
    gains.set_defaults(func=_cmd_gains)

    sweep = subs.add_parser(
        "sweep", parents=[common], help="fixed-rate bias sweep of one channel"
    )
    _add_system_flags(sweep)
    sweep.add_argument("--k", type=int, required=True, help="channel index (0-based)")
    sweep.add_argument("--grid", type=int, default=101)
    sweep.set_defaults(func=_cmd_sweep)

    sim = subs.add_parser(
        "simulate", parents=[common], help="seeded trial simulation of a policy"
    )
    _add_system_flags(sim)
    sim.add_argument("--trials", type=int, default=100_000)
    sim.add_argument("--workers", type=int, default=1)
    sim.add_argument("--policy", help="path to a policy-table JSON file")
    sim.set_defaults(func=_cmd_simulate)

    claim1 = subs.add_parser(
        "claim1", parents=[common], help="exact central-binomial identity checks"
    )
    claim1.add_argument("--m-max", type=int, default=64)
    claim1.set_defaults(func=_cmd_claim1)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return int(args.func(args) or 0)
    except SizeGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except _InconsistentInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (ValueError, KeyError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
