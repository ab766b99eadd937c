"""Minimum error probability of the posterior-optimal policy, several ways.

Routes: exact enumeration over 2**n outcomes, a binomial fast path for
identical channels, a log-domain binomial variant that scales to n ~ 1e6,
and the closed form for all-S systems. The fixed-rate bias sweep exposes
the coordinate-wise concavity of the error in one channel's bias, and the
rate-constrained log-likelihood derivative gives the matching analytic
slope of the per-outcome score.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import comb, gammaln, logsumexp

from . import _backend
from .decision import DecisionPolicy
from .model import Channel, Prior, SizeGuardError, SystemSpec, _as_rates

__all__ = [
    "ENUMERATION_LIMIT",
    "SWEEP_LIMIT",
    "LIKELIHOOD_LIMIT",
    "ErrorReport",
    "BiasSweep",
    "exact_error_probability",
    "identical_error_probability",
    "log_identical_error_probability",
    "fully_biased_error",
    "extreme_bias_floor",
    "bias_sweep",
    "llr_rate_constrained_derivative",
    "likelihood_vectors",
    "policy_error_probability",
    "sweep_to_csv",
]

ENUMERATION_LIMIT = 24
SWEEP_LIMIT = 20
LIKELIHOOD_LIMIT = 20

METHOD_ENUMERATION = "enumeration"
METHOD_BINOMIAL = "binomial"
METHOD_LOG_BINOMIAL = "log-binomial"
METHOD_CLOSED_FORM = "closed-form"


@dataclass(frozen=True)
class ErrorReport:
    """A minimum-error value with its computation route.

    ``floor_condition`` is set by the closed-form route: True when the
    extreme-bias product floor rho0 * prod(r_i / rho0) is <= rho1, i.e. the
    floor itself (rather than rho1) is the attained minimum.
    """

    p_error: float
    log_p_error: float
    method: str
    floor_condition: bool | None = None


def _report(p: float, method: str, log_p: float | None = None, **kw) -> ErrorReport:
    if log_p is None:
        log_p = math.log(p) if p > 0.0 else -math.inf
    return ErrorReport(p, log_p, method, **kw)


def exact_error_probability(system: SystemSpec) -> ErrorReport:
    """Enumerate min(rho0 * A(y), rho1 * B(y)) over all 2**n outcomes."""
    if system.n > ENUMERATION_LIMIT:
        raise SizeGuardError(
            f"enumeration capped at n={ENUMERATION_LIMIT}, got n={system.n}"
        )
    p = _backend.minsum_total(
        system.alphas, system.betas, system.prior.rho0, system.prior.rho1
    )
    return _report(p, METHOD_ENUMERATION)


def identical_error_probability(
    n: int, prior: Prior, alpha: float, beta: float
) -> ErrorReport:
    """Binomial route for n identical channels.

    With identical channels the optimal decision depends only on the count
    k of ones, so the outcome sum collapses to
    sum_k C(n,k) * min(rho0 * alpha^k (1-alpha)^(n-k),
                       rho1 * (1-beta)^k beta^(n-k)).
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be positive")
    k = np.arange(n + 1)
    with np.errstate(invalid="ignore"):
        t0 = prior.rho0 * np.power(alpha, k) * np.power(1.0 - alpha, n - k)
        t1 = prior.rho1 * np.power(1.0 - beta, k) * np.power(beta, n - k)
    weights = comb(n, k)
    p = float(np.dot(weights, np.minimum(t0, t1)))
    return _report(p, METHOD_BINOMIAL)


def log_identical_error_probability(n: int, prior: Prior, r: float) -> ErrorReport:
    """Log-domain binomial route for n identical unbiased channels.

    Stable for very large n: ln C(n,k) comes from log-gamma and the k-sum is
    taken with log-sum-exp. Requires r in (0, 1/2].
    """
    n = int(n)
    r = float(r)
    if n < 1:
        raise ValueError("n must be positive")
    if not 0.0 < r <= 0.5:
        raise ValueError(f"unbiased rate must lie in (0, 1/2], got {r}")
    k = np.arange(n + 1, dtype=np.float64)
    log_comb = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
    log_r = math.log(r)
    log_q = math.log1p(-r) if r < 1.0 else -math.inf
    log_t0 = math.log(prior.rho0) + k * log_r + (n - k) * log_q
    log_t1 = math.log(prior.rho1) + k * log_q + (n - k) * log_r
    log_p = float(logsumexp(log_comb + np.minimum(log_t0, log_t1)))
    p = math.exp(log_p) if log_p > -745.0 else 0.0
    return ErrorReport(p, log_p, METHOD_LOG_BINOMIAL)


def extreme_bias_floor(prior: Prior, rates) -> float:
    """The product floor rho0 * prod(r_i / rho0) of the all-S system."""
    arr = np.asarray(rates, dtype=np.float64)
    return float(prior.rho0 * np.prod(arr / prior.rho0))


def fully_biased_error(n: int, prior: Prior, rates) -> ErrorReport:
    """Closed form for the all-S system: min(rho0 * prod(r_i/rho0), rho1).

    Every outcome except all-ones has B(y) = 0, so only the all-ones term
    can contribute; the minimum there is the product floor or rho1,
    whichever is smaller.
    """
    if not prior.is_canonical:
        raise ValueError("closed form requires a canonical prior (rho0 >= rho1)")
    arr = _as_rates(rates, int(n))
    floor = extreme_bias_floor(prior, arr)
    log_rho0 = math.log(prior.rho0)
    if np.any(arr == 0.0):
        log_floor = -math.inf
    else:
        log_floor = log_rho0 + float(np.sum(np.log(arr) - log_rho0))
    log_rho1 = math.log(prior.rho1)
    condition = floor <= prior.rho1
    if condition:
        p, log_p = floor, log_floor
    else:
        p, log_p = prior.rho1, log_rho1
    return ErrorReport(p, log_p, METHOD_CLOSED_FORM, floor_condition=condition)


@dataclass(frozen=True)
class BiasSweep:
    """Error probabilities along one channel's feasible bias interval.

    The grid spans [max(0, (r_k - rho1)/rho0), r_k/rho0] with the channel's
    rate held fixed through the back-solve beta = (r_k - rho0*alpha)/rho1.
    When r_k >= rho1 (and rho0 > rho1) the interior point
    alpha = (r_k - rho1)/(rho0 - rho1), where alpha + beta = 1 crosses 1, is
    inserted as an explicit grid member and recorded as ``local_max_alpha``.
    """

    channel_index: int
    alpha_grid: np.ndarray
    beta_grid: np.ndarray
    p_error_at: np.ndarray
    local_max_alpha: float | None = None
    local_max_index: int | None = None

    def max_positive_second_difference(self) -> float:
        """Largest convexity violation over consecutive grid triples.

        Uses the chord test generalized to uneven spacing; on a uniform grid
        it reduces to the ordinary second difference p[j-1] - 2p[j] + p[j+1].
        Values <= 0 everywhere mean the sweep looks concave.
        """
        x = self.alpha_grid
        p = self.p_error_at
        worst = -math.inf
        for j in range(1, len(x) - 1):
            h1 = x[j] - x[j - 1]
            h2 = x[j + 1] - x[j]
            if h1 + h2 <= 0.0:
                continue
            chord = (h2 * p[j - 1] + h1 * p[j + 1]) / (h1 + h2)
            worst = max(worst, 2.0 * (chord - p[j]))
        return worst if worst > -math.inf else 0.0

    def min_is_at_endpoint(self, tol: float = 1e-12) -> bool:
        return float(self.p_error_at.min()) >= (
            min(self.p_error_at[0], self.p_error_at[-1]) - tol
        )


def bias_sweep(system: SystemSpec, k: int, grid_size: int) -> BiasSweep:
    """Sweep channel k's bias over its feasible interval at fixed rate."""
    if not 0 <= k < system.n:
        raise ValueError(f"channel index {k} out of range for n={system.n}")
    if grid_size < 3:
        raise ValueError("grid_size must be at least 3")
    if system.n > SWEEP_LIMIT:
        raise SizeGuardError(f"bias sweep capped at n={SWEEP_LIMIT}")
    if not system.is_canonical:
        raise ValueError("bias sweep requires a canonical system")
    rho0, rho1 = system.prior.rho0, system.prior.rho1
    rk = float(system.rates()[k])
    lo = max(0.0, (rk - rho1) / rho0)
    hi = rk / rho0
    grid = np.linspace(lo, hi, grid_size)

    local_max = None
    local_index = None
    if rk >= rho1 and rho0 > rho1:
        local_max = (rk - rho1) / (rho0 - rho1)
        nearest = int(np.argmin(np.abs(grid - local_max)))
        if abs(grid[nearest] - local_max) <= 1e-9:
            local_index = nearest
        else:
            pos = int(np.searchsorted(grid, local_max))
            grid = np.insert(grid, pos, local_max)
            local_index = pos

    betas = np.clip((rk - rho0 * grid) / rho1, 0.0, 1.0)
    p = np.array(
        [
            exact_error_probability(
                system.with_channel(k, Channel(float(a), float(b)))
            ).p_error
            for a, b in zip(grid, betas)
        ]
    )
    return BiasSweep(k, grid, betas, p, local_max, local_index)


def llr_rate_constrained_derivative(
    system: SystemSpec, k: int, y: Sequence[int]
) -> float:
    """Analytic slope of ln(A(y)/B(y)) in alpha_k at fixed channel rate.

    The move is coupled: beta_k follows alpha_k along
    d(beta)/d(alpha) = -rho0/rho1 so that r_k stays constant. Only channel
    k's term of the additive score moves:

        y_k = 1:  (rho1 - r_k) / (rho1 * alpha_k * (1 - beta_k))
        y_k = 0:  (rho0 - r_k) / (rho1 * beta_k * (1 - alpha_k))

    Both channel parameters must be strictly interior.
    """
    if not 0 <= k < system.n:
        raise ValueError(f"channel index {k} out of range for n={system.n}")
    if len(y) != system.n:
        raise ValueError(f"outcome length {len(y)} != system n {system.n}")
    ch = system.channels[k]
    if not (0.0 < ch.alpha < 1.0 and 0.0 < ch.beta < 1.0):
        raise ValueError("derivative needs interior alpha, beta in (0, 1)")
    rho0, rho1 = system.prior.rho0, system.prior.rho1
    rk = rho0 * ch.alpha + rho1 * ch.beta
    if int(y[k]) == 1:
        return (rho1 - rk) / (rho1 * ch.alpha * (1.0 - ch.beta))
    return (rho0 - rk) / (rho1 * ch.beta * (1.0 - ch.alpha))


def likelihood_vectors(system: SystemSpec) -> tuple[np.ndarray, np.ndarray]:
    """Full conditional distributions (A, B) over all 2**n outcomes."""
    if system.n > LIKELIHOOD_LIMIT:
        raise SizeGuardError(
            f"likelihood vectors capped at n={LIKELIHOOD_LIMIT}, got n={system.n}"
        )
    return _backend.likelihood_arrays(system.alphas, system.betas)


def policy_error_probability(system: SystemSpec, policy) -> float:
    """Error probability of an arbitrary policy (table or DecisionPolicy).

    Sums rho1 * B(y) over outcomes decided 0 and rho0 * A(y) over outcomes
    decided 1; with the posterior-optimal table this reproduces
    :func:`exact_error_probability` and for any other table it can only be
    larger.
    """
    if isinstance(policy, DecisionPolicy):
        if policy.table is None:
            raise ValueError("policy has no materialized table")
        table = policy.table
    else:
        table = np.asarray(policy, dtype=np.uint8)
    if table.shape != (1 << system.n,):
        raise ValueError(
            f"table must have 2**{system.n} entries, got shape {table.shape}"
        )
    A, B = likelihood_vectors(system)
    contrib = np.where(table == 1, system.prior.rho0 * A, system.prior.rho1 * B)
    return float(contrib.sum())


def sweep_to_csv(sweep: BiasSweep) -> str:
    """CSV export with 17-significant-digit floats."""
    lines = ["alpha_k,beta_k,p_error"]
    for a, b, p in zip(sweep.alpha_grid, sweep.beta_grid, sweep.p_error_at):
        lines.append(f"{a:.17g},{b:.17g},{p:.17g}")
    return "\n".join(lines) + "\n"
