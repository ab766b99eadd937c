"""Error-optimal decisions for a channel system.

The posterior-optimal rule compares rho0 * P(y | X=0) against
rho1 * P(y | X=1) and outputs the likelier source bit; ties go to 0, the
a-priori likely value under a canonical prior. Likelihoods are always
multiplied out in the probability domain so that the structural zeros of
fully-biased channels stay exact; the additive log-likelihood form is a
derived view with explicit +/-inf bookkeeping.
"""

from __future__ import annotations

import base64
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._backend import map_table as _map_table
from .model import SizeGuardError, SystemSpec

__all__ = [
    "DEFAULT_TABLE_LIMIT",
    "LikelihoodPair",
    "LlrWeights",
    "DecisionPolicy",
    "outcome_to_index",
    "index_to_outcome",
    "likelihoods",
    "map_decide",
    "llr_weights",
    "policy_table",
    "policy_table_to_json",
    "policy_table_from_json",
]

#: Largest n for which a 2**n decision table may be materialized (16 MiB of
#: table bytes at the limit).
DEFAULT_TABLE_LIMIT = 24


def outcome_to_index(y: Sequence[int]) -> int:
    """Pack an outcome vector into an integer, channel i at bit i."""
    idx = 0
    for i, bit in enumerate(y):
        b = int(bit)
        if b not in (0, 1):
            raise ValueError(f"outcome bits must be 0 or 1, got {bit!r}")
        idx |= b << i
    return idx


def index_to_outcome(index: int, n: int) -> tuple[int, ...]:
    return tuple((int(index) >> i) & 1 for i in range(n))


@dataclass(frozen=True)
class LikelihoodPair:
    """Outcome likelihoods a = P(y | X=0), b = P(y | X=1)."""

    a: float
    b: float

    @property
    def delta(self) -> float:
        return self.a - self.b

    @property
    def ratio(self) -> float:
        """a / b; +inf when b == 0 < a, nan when both vanish."""
        if self.b > 0.0:
            return self.a / self.b
        return math.inf if self.a > 0.0 else math.nan

    @property
    def ratio_is_defined(self) -> bool:
        return self.a > 0.0 or self.b > 0.0


def likelihoods(system: SystemSpec, y: Sequence[int]) -> LikelihoodPair:
    """Exact probability-domain products for one outcome vector."""
    if len(y) != system.n:
        raise ValueError(f"outcome length {len(y)} != system n {system.n}")
    a = 1.0
    b = 1.0
    for bit, ch in zip(y, system.channels):
        if int(bit) == 1:
            a *= ch.alpha
            b *= 1.0 - ch.beta
        else:
            a *= 1.0 - ch.alpha
            b *= ch.beta
    return LikelihoodPair(a, b)


def map_decide(system: SystemSpec, y: Sequence[int]) -> int:
    """Posterior-optimal decision for one outcome; ties decide 0."""
    lp = likelihoods(system, y)
    return 1 if system.prior.rho0 * lp.a < system.prior.rho1 * lp.b else 0


@dataclass(frozen=True)
class LlrWeights:
    """Additive log-likelihood contributions per channel.

    ``w1[i] = ln(alpha_i / (1 - beta_i))`` is added when channel i reports 1
    and ``w0[i] = ln((1 - alpha_i) / beta_i)`` when it reports 0; the summed
    score is compared against ``threshold = ln(rho1 / rho0)``, deciding 1 on
    strictly smaller. Structural zeros surface as +/-inf entries.
    """

    system: SystemSpec = field(repr=False)
    w0: np.ndarray
    w1: np.ndarray
    threshold: float

    def decide(self, y: Sequence[int]) -> int:
        """Decision via the additive form.

        Any -inf term forces 1 and any +inf term forces 0; conflicting
        infinities (or a nan from a channel that cannot emit the observed
        bit) fall back to the probability-domain comparison.
        """
        terms = np.array(
            [self.w1[i] if int(bit) else self.w0[i] for i, bit in enumerate(y)]
        )
        if np.any(np.isnan(terms)):
            return map_decide(self.system, y)
        neg = np.any(np.isneginf(terms))
        pos = np.any(np.isposinf(terms))
        if neg and pos:
            return map_decide(self.system, y)
        if neg:
            return 1
        if pos:
            return 0
        return 1 if float(terms.sum()) < self.threshold else 0


def llr_weights(system: SystemSpec) -> LlrWeights:
    """Per-channel additive log-likelihood weights with +/-inf markers."""
    a = system.alphas
    b = system.betas
    with np.errstate(divide="ignore", invalid="ignore"):
        w1 = np.log(a / (1.0 - b))
        w0 = np.log((1.0 - a) / b)
        threshold = math.log(system.prior.rho1 / system.prior.rho0)
    return LlrWeights(system, w0, w1, threshold)


@dataclass(frozen=True, eq=False)
class DecisionPolicy:
    """A map from outcome vectors to decisions.

    ``decide`` is the comparator; ``table`` optionally materializes it over
    all 2**n outcomes, indexed with channel i's bit at position i.
    """

    system: SystemSpec
    decide: Callable[[Sequence[int]], int]
    table: np.ndarray | None = None

    @classmethod
    def from_table(cls, system: SystemSpec, table: np.ndarray) -> "DecisionPolicy":
        table = np.asarray(table, dtype=np.uint8)
        if table.shape != (1 << system.n,):
            raise ValueError(
                f"table must have 2**{system.n} entries, got shape {table.shape}"
            )
        return cls(system, lambda y: int(table[outcome_to_index(y)]), table)


def policy_table(
    system: SystemSpec, table_limit: int = DEFAULT_TABLE_LIMIT
) -> DecisionPolicy:
    """Materialize the posterior-optimal policy over all outcomes."""
    if system.n > table_limit:
        raise SizeGuardError(
            f"n={system.n} exceeds the table limit {table_limit}"
        )
    table = _map_table(
        system.alphas, system.betas, system.prior.rho0, system.prior.rho1
    )
    return DecisionPolicy.from_table(system, table)


def policy_table_to_json(policy: DecisionPolicy) -> str:
    """Serialize a materialized policy as little-endian packed bits."""
    if policy.table is None:
        raise ValueError("policy has no materialized table to export")
    packed = np.packbits(policy.table, bitorder="little")
    return json.dumps(
        {"n": policy.system.n, "bits": base64.b64encode(packed.tobytes()).decode()}
    )


def policy_table_from_json(text: str) -> tuple[int, np.ndarray]:
    """Inverse of :func:`policy_table_to_json`; returns (n, table)."""
    data = json.loads(text)
    n = int(data["n"])
    raw = np.frombuffer(base64.b64decode(data["bits"]), dtype=np.uint8)
    if raw.size * 8 < (1 << n):
        raise ValueError(f"bit string too short for n={n}")
    table = np.unpackbits(raw, count=1 << n, bitorder="little")
    return n, table
