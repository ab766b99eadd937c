"""Gain of fully-biased over unbiased systems at a matched error rate.

For a common channel error rate r in (0, 1/2], the log of the ratio
P_e(unbiased) / P_e(all-S) is bracketed by

    m*ln(4*rho0^2*c) - ln(4m/rho1)  <=  ln(gain)  <=  m*ln(4*rho0^2*c) + ln(2(m+1)/rho0)

with m = floor(n/2) and c = 1/r - 1, and (1/n)*ln(gain) converges to the
rate (1/2)*ln(4*rho0^2*c). This module evaluates the bounds, the exact
gain via the binomial / log-binomial error routes, and the exact
big-integer identities the bracket rests on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .error_analysis import (
    exact_error_probability,
    fully_biased_error,
    identical_error_probability,
    log_identical_error_probability,
)
from .model import Prior, make_fully_biased_system, make_unbiased_system

__all__ = [
    "GainBounds",
    "ConvergenceRow",
    "gain_bounds",
    "exact_log_gain",
    "exact_gain_ratio",
    "convergence_table",
    "claim1_check",
    "convergence_to_csv",
]

#: Above this n the exact gain switches to the log-domain binomial route
#: (the direct route is exact but the enumeration cross-checks stop here).
_DIRECT_GAIN_LIMIT = 24


def _check_gain_inputs(prior: Prior, r: float) -> None:
    if not prior.is_canonical or prior.rho1 <= 0.0:
        raise ValueError("gain analysis requires a canonical prior with rho1 > 0")
    if not 0.0 < r <= 0.5:
        raise ValueError(f"common rate must lie in (0, 1/2], got {r}")


@dataclass(frozen=True)
class GainBounds:
    """Bracket on ln(P_e(unbiased) / P_e(all-S)) plus the limiting rate."""

    n: int
    m: int
    c: float
    log_gain_lower: float
    log_gain_upper: float
    asymptotic_rate: float
    exact_log_gain: float | None = None


def exact_log_gain(n: int, prior: Prior, r: float) -> float:
    """ln of the exact unbiased-to-fully-biased error ratio."""
    _check_gain_inputs(prior, r)
    n = int(n)
    if n < 1:
        raise ValueError("n must be positive")
    fb = fully_biased_error(n, prior, np.full(n, float(r)))
    if n <= _DIRECT_GAIN_LIMIT:
        ub = identical_error_probability(n, prior, float(r), float(r))
    else:
        ub = log_identical_error_probability(n, prior, float(r))
    return ub.log_p_error - fb.log_p_error


def exact_gain_ratio(n: int, prior: Prior, r: float) -> float:
    """Exact error-probability ratio P_e(unbiased) / P_e(all-S).

    For n <= 24 the ratio is additionally computed by enumerating both
    systems and must agree with the formula route to relative 1e-9.
    """
    log_gain = exact_log_gain(n, prior, r)
    ratio = math.exp(log_gain)
    n = int(n)
    if n <= _DIRECT_GAIN_LIMIT:
        p_u = exact_error_probability(make_unbiased_system(n, prior, r)).p_error
        p_f = exact_error_probability(
            make_fully_biased_system(n, prior, np.full(n, float(r)))
        ).p_error
        enum_ratio = p_u / p_f
        if not math.isclose(ratio, enum_ratio, rel_tol=1e-9):
            raise ArithmeticError(
                f"gain routes disagree: formula {ratio!r} vs enumeration {enum_ratio!r}"
            )
    return ratio


def gain_bounds(n: int, prior: Prior, r: float) -> GainBounds:
    """Evaluate the log-gain bracket and the exact value it contains."""
    _check_gain_inputs(prior, r)
    n = int(n)
    if n < 2:
        raise ValueError("bounds need n >= 2 (m = floor(n/2) must be positive)")
    m = n // 2
    c = 1.0 / float(r) - 1.0
    base = m * math.log(4.0 * prior.rho0**2 * c)
    lower = base - math.log(4.0 * m / prior.rho1)
    upper = base + math.log(2.0 * (m + 1) / prior.rho0)
    rate = 0.5 * math.log(4.0 * prior.rho0**2 * c)
    return GainBounds(n, m, c, lower, upper, rate, exact_log_gain(n, prior, r))


@dataclass(frozen=True)
class ConvergenceRow:
    """Per-n growth rates: exact, bracket and the limiting value, all /n."""

    n: int
    rate_exact: float
    rate_lower: float
    rate_upper: float
    rate_asymptotic: float


def convergence_table(
    prior: Prior, r: float, n_values: Sequence[int]
) -> list[ConvergenceRow]:
    """Normalized log-gain exponents along an ascending list of n."""
    ns = [int(v) for v in n_values]
    if any(v < 2 for v in ns):
        raise ValueError("all n values must be >= 2")
    if ns != sorted(ns):
        raise ValueError("n values must be ascending")
    rows = []
    for n in ns:
        b = gain_bounds(n, prior, r)
        rows.append(
            ConvergenceRow(
                n,
                b.exact_log_gain / n,
                b.log_gain_lower / n,
                b.log_gain_upper / n,
                b.asymptotic_rate,
            )
        )
    return rows


def convergence_to_csv(rows: Sequence[ConvergenceRow]) -> str:
    lines = ["n,rate_exact,rate_lower,rate_upper,rate_asymptotic"]
    for row in rows:
        lines.append(
            f"{row.n},{row.rate_exact:.17g},{row.rate_lower:.17g},"
            f"{row.rate_upper:.17g},{row.rate_asymptotic:.17g}"
        )
    return "\n".join(lines) + "\n"


def claim1_check(m: int) -> tuple[bool, bool]:
    """Exact verification of the two central-binomial facts used in the bracket.

    Checks C(2m+1, m) < 2*C(2m, m) with big integers and
    C(2m, m) == 4^m * prod_{j=1..m} (1 - 1/(2j)) with exact rationals.
    No floating point is involved.
    """
    m = int(m)
    if m < 1:
        raise ValueError("m must be a positive integer")
    inequality = math.comb(2 * m + 1, m) < 2 * math.comb(2 * m, m)
    product = Fraction(4) ** m
    for j in range(1, m + 1):
        product *= Fraction(2 * j - 1, 2 * j)
    identity = product == math.comb(2 * m, m)
    return inequality, identity
