"""Independent brute-force oracles and samplers shared by the tests.

These deliberately avoid the library's kernels: outcomes are enumerated
with itertools and products taken with plain floats, so agreement with the
library is a real cross-check rather than a tautology.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from biasfuse import Prior, SystemSpec, random_system_with_rates


def outcome_probs(system: SystemSpec, y) -> tuple[float, float]:
    a = 1.0
    b = 1.0
    for bit, ch in zip(y, system.channels):
        if bit:
            a *= ch.alpha
            b *= 1.0 - ch.beta
        else:
            a *= 1.0 - ch.alpha
            b *= ch.beta
    return a, b


def brute_force_error(system: SystemSpec) -> float:
    """Min-sum over all outcomes, enumerated independently of the kernels."""
    rho0, rho1 = system.prior.rho0, system.prior.rho1
    total = 0.0
    for y in itertools.product((0, 1), repeat=system.n):
        a, b = outcome_probs(system, y)
        total += min(rho0 * a, rho1 * b)
    return total


def brute_force_policy_error(system: SystemSpec, decide) -> float:
    """Error probability of an arbitrary decide(y) -> {0,1} comparator."""
    rho0, rho1 = system.prior.rho0, system.prior.rho1
    total = 0.0
    for y in itertools.product((0, 1), repeat=system.n):
        a, b = outcome_probs(system, y)
        total += rho0 * a if decide(y) == 1 else rho1 * b
    return total


def brute_force_log_ratio(system: SystemSpec, y) -> float:
    a, b = outcome_probs(system, y)
    return math.log(a) - math.log(b)


def random_canonical_system(
    rng: np.random.Generator,
    n: int | None = None,
    rho0_range=(0.5, 0.95),
    rate_range=(0.02, 0.5),
    max_n: int = 6,
) -> SystemSpec:
    if n is None:
        n = int(rng.integers(1, max_n + 1))
    prior = Prior.from_rho0(float(rng.uniform(*rho0_range)))
    rates = rng.uniform(*rate_range, n)
    return random_system_with_rates(n, prior, rates, seed=int(rng.integers(2**62)))
