"""Domain types for the binary-relay decision problem.

A source bit X with prior (rho0, rho1) is observed through n independent
binary channels. Channel i flips inputs with probabilities
``alpha_i = P(Y_i = 1 | X = 0)`` and ``beta_i = P(Y_i = 0 | X = 1)``; its
prior-weighted error rate is ``r_i = rho0*alpha_i + rho1*beta_i``.

A system is *canonical* when rho0 >= rho1 and every r_i <= 1/2.
:func:`canonicalize` reduces any system to that form by relabelling the bit
values and/or flipping channel outputs, both of which preserve achievable
error probabilities.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SizeGuardError",
    "Prior",
    "Channel",
    "SystemSpec",
    "CanonicalTransform",
    "error_rate",
    "canonicalize",
    "make_unbiased_system",
    "make_fully_biased_system",
    "random_system_with_rates",
]

PRIOR_SUM_TOL = 1e-12
#: Slack when testing r_i <= 1/2; keeps canonicalize idempotent under rounding.
CANONICAL_RATE_TOL = 1e-12


class SizeGuardError(ValueError):
    """An operation over 2**n outcomes would exceed its configured size limit."""


def _as_prob(name: str, value) -> float:
    v = float(value)
    if not math.isfinite(v) or v < 0.0 or v > 1.0:
        raise ValueError(f"{name} must be a probability in [0, 1], got {value!r}")
    return v


@dataclass(frozen=True)
class Prior:
    """Source distribution (rho0, rho1) of the bit X."""

    rho0: float
    rho1: float

    def __post_init__(self):
        object.__setattr__(self, "rho0", _as_prob("rho0", self.rho0))
        object.__setattr__(self, "rho1", _as_prob("rho1", self.rho1))
        if abs(self.rho0 + self.rho1 - 1.0) > PRIOR_SUM_TOL:
            raise ValueError(f"rho0 + rho1 must equal 1, got {self.rho0 + self.rho1}")

    @classmethod
    def from_rho0(cls, rho0: float) -> "Prior":
        return cls(float(rho0), 1.0 - float(rho0))

    @property
    def is_canonical(self) -> bool:
        return self.rho0 >= self.rho1

    def swapped(self) -> "Prior":
        """Prior after renaming the bit values 0 <-> 1."""
        return Prior(self.rho1, self.rho0)


@dataclass(frozen=True)
class Channel:
    """One relay's crossover pair (alpha, beta).

    alpha = P(Y=1 | X=0), beta = P(Y=0 | X=1). The channel is unbiased when
    alpha == beta, an S-channel when beta == 0 (a 1 is never corrupted) and
    a Z-channel when alpha == 0.
    """

    alpha: float
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", _as_prob("alpha", self.alpha))
        object.__setattr__(self, "beta", _as_prob("beta", self.beta))

    @property
    def is_unbiased(self) -> bool:
        return self.alpha == self.beta

    @property
    def is_s_channel(self) -> bool:
        return self.beta == 0.0

    @property
    def is_z_channel(self) -> bool:
        return self.alpha == 0.0

    @property
    def is_fully_biased(self) -> bool:
        return self.is_s_channel or self.is_z_channel

    def flipped(self) -> "Channel":
        """Channel seen through an output flip Y -> 1 - Y."""
        return Channel(1.0 - self.alpha, 1.0 - self.beta)


def error_rate(channel: Channel, prior: Prior) -> float:
    """Prior-weighted flip probability rho0*alpha + rho1*beta."""
    return prior.rho0 * channel.alpha + prior.rho1 * channel.beta


@dataclass(frozen=True)
class SystemSpec:
    """A prior plus an ordered collection of independent channels."""

    prior: Prior
    channels: tuple[Channel, ...]

    def __post_init__(self):
        object.__setattr__(self, "channels", tuple(self.channels))
        if len(self.channels) < 1:
            raise ValueError("a system needs at least one channel")
        if not all(isinstance(c, Channel) for c in self.channels):
            raise TypeError("channels must be Channel instances")
        if self.prior.rho0 <= 0.0 or self.prior.rho1 <= 0.0:
            # A one-sided prior makes the decision problem trivial and breaks
            # the beta back-solve; reject it at system construction.
            raise ValueError("system priors must have rho0 > 0 and rho1 > 0")

    @property
    def n(self) -> int:
        return len(self.channels)

    @property
    def alphas(self) -> np.ndarray:
        return np.array([c.alpha for c in self.channels], dtype=np.float64)

    @property
    def betas(self) -> np.ndarray:
        return np.array([c.beta for c in self.channels], dtype=np.float64)

    def rates(self) -> np.ndarray:
        """Per-channel error rates r_i = rho0*alpha_i + rho1*beta_i."""
        return self.prior.rho0 * self.alphas + self.prior.rho1 * self.betas

    @property
    def is_canonical(self) -> bool:
        return self.prior.is_canonical and bool(
            np.all(self.rates() <= 0.5 + CANONICAL_RATE_TOL)
        )

    def with_channel(self, k: int, channel: Channel) -> "SystemSpec":
        chans = list(self.channels)
        chans[k] = channel
        return SystemSpec(self.prior, tuple(chans))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "rho0": self.prior.rho0,
            "alpha": [c.alpha for c in self.channels],
            "beta": [c.beta for c in self.channels],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "SystemSpec":
        n = int(data["n"])
        alpha = list(data["alpha"])
        beta = list(data["beta"])
        if len(alpha) != n or len(beta) != n:
            raise ValueError(
                f"system spec n={n} does not match alpha/beta lengths "
                f"{len(alpha)}/{len(beta)}"
            )
        prior = Prior.from_rho0(float(data["rho0"]))
        return cls(prior, tuple(Channel(a, b) for a, b in zip(alpha, beta)))

    @classmethod
    def from_json(cls, text: str) -> "SystemSpec":
        return cls.from_dict(json.loads(text))


def _as_rates(rates, n: int, require_canonical: bool = True) -> np.ndarray:
    arr = np.asarray(rates, dtype=np.float64)
    if arr.shape != (n,):
        raise ValueError(f"expected {n} rates, got shape {arr.shape}")
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError("rates must lie in [0, 1]")
    if require_canonical and np.any(arr > 0.5 + CANONICAL_RATE_TOL):
        raise ValueError("rates must satisfy r_i <= 1/2 (canonicalize first)")
    return arr


@dataclass(frozen=True)
class CanonicalTransform:
    """Record of the relabellings applied by :func:`canonicalize`.

    ``label_swapped`` renames the bit values 0 <-> 1 everywhere (source and
    outputs); ``flipped_channels`` lists channels whose output alone was
    flipped afterwards. Together they suffice to translate outcomes into
    canonical coordinates and decisions back out.
    """

    label_swapped: bool
    flipped_channels: tuple[int, ...]

    @property
    def is_identity(self) -> bool:
        return not self.label_swapped and not self.flipped_channels

    def outcome_to_canonical(self, y) -> tuple[int, ...]:
        bits = [int(b) for b in y]
        if self.label_swapped:
            bits = [1 - b for b in bits]
        for k in self.flipped_channels:
            bits[k] = 1 - bits[k]
        return tuple(bits)

    def decision_to_original(self, decision: int) -> int:
        return 1 - int(decision) if self.label_swapped else int(decision)


def canonicalize(system: SystemSpec) -> tuple[SystemSpec, CanonicalTransform]:
    """Reduce a system to canonical form (rho0 >= rho1, every r_i <= 1/2).

    Returns the equivalent canonical system together with the transform
    record. Both steps preserve the minimum achievable error probability:
    a global bit relabel permutes outcome probabilities, and an output flip
    Y_k -> 1 - Y_k maps (alpha_k, beta_k) to (1-alpha_k, 1-beta_k).
    """
    prior = system.prior
    channels = list(system.channels)
    label_swapped = False
    if not prior.is_canonical:
        label_swapped = True
        prior = prior.swapped()
        channels = [Channel(c.beta, c.alpha) for c in channels]

    flipped = []
    for k, ch in enumerate(channels):
        if error_rate(ch, prior) > 0.5 + CANONICAL_RATE_TOL:
            channels[k] = ch.flipped()
            flipped.append(k)

    transform = CanonicalTransform(label_swapped, tuple(flipped))
    if transform.is_identity:
        return system, transform
    return SystemSpec(prior, tuple(channels)), transform


def make_unbiased_system(n: int, prior: Prior, r: float) -> SystemSpec:
    """System of n identical unbiased channels with alpha = beta = r."""
    r = float(r)
    if not 0.0 < r <= 0.5:
        raise ValueError(f"unbiased rate must lie in (0, 1/2], got {r}")
    return SystemSpec(prior, tuple(Channel(r, r) for _ in range(int(n))))


def make_fully_biased_system(n: int, prior: Prior, rates) -> SystemSpec:
    """System of n S-channels (beta = 0) hitting the requested error rates.

    Channel i gets alpha_i = r_i / rho0, so rho0*alpha_i + rho1*0 = r_i.
    Requires a canonical prior and r_i <= 1/2 so that every alpha_i <= 1.
    """
    if not prior.is_canonical:
        raise ValueError("fully-biased construction requires rho0 >= rho1")
    arr = _as_rates(rates, int(n))
    alphas = arr / prior.rho0
    if np.any(alphas > 1.0):
        raise ValueError("some r_i / rho0 exceeds 1; no S-channel attains it")
    return SystemSpec(prior, tuple(Channel(float(a), 0.0) for a in alphas))


def random_system_with_rates(n: int, prior: Prior, rates, seed: int) -> SystemSpec:
    """Random biases hitting the requested error rates exactly.

    For each channel, alpha is drawn uniformly from the feasible interval
    [max(0, (r_i - rho1)/rho0), r_i/rho0] and beta back-solved as
    (r_i - rho0*alpha)/rho1, which keeps beta inside [0, 1]. Deterministic
    for a fixed seed (counter-based Philox generator).
    """
    if prior.rho1 <= 0.0:
        raise ValueError("rho1 = 0 leaves beta undefined; prior is degenerate")
    if not prior.is_canonical:
        raise ValueError("random construction requires a canonical prior")
    arr = _as_rates(rates, int(n))
    rng = np.random.Generator(np.random.Philox(int(seed) & (2**64 - 1)))
    lo = np.maximum(0.0, (arr - prior.rho1) / prior.rho0)
    hi = arr / prior.rho0
    alphas = lo + rng.random(int(n)) * (hi - lo)
    betas = np.clip((arr - prior.rho0 * alphas) / prior.rho1, 0.0, 1.0)
    return SystemSpec(
        prior, tuple(Channel(float(a), float(b)) for a, b in zip(alphas, betas))
    )
