"""Seeded simulation of the source and channels under any decision policy.

Trials are laid out in fixed logical shards of 65536; shard s draws its
uniforms from an independent Philox stream keyed by (seed, s). The shard
layout depends only on the trial count, so results are invariant to how
many workers process the shards. Within a trial the draw order is fixed:
the source bit first, then channel 1 through n.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _backend
from .decision import DecisionPolicy, index_to_outcome
from .model import SystemSpec

__all__ = ["SHARD_SIZE", "GENERATOR_NAME", "SimConfig", "SimResult",
           "simulate", "simulate_policy_comparison"]

SHARD_SIZE = 1 << 16
GENERATOR_NAME = "numpy-philox"
_OUTCOME_HISTOGRAM_LIMIT = 16


@dataclass(frozen=True)
class SimConfig:
    """Trial count, seed and target system for a simulation run."""

    trials: int
    seed: int
    system: SystemSpec

    def __post_init__(self):
        if int(self.trials) < 1:
            raise ValueError("trials must be >= 1")
        object.__setattr__(self, "trials", int(self.trials))
        object.__setattr__(self, "seed", int(self.seed))


@dataclass(frozen=True, eq=False)
class SimResult:
    """Empirical error estimate; counts are exact integers."""

    trials: int
    errors: int
    empirical_error: float
    std_error: float
    seed: int
    generator: str = GENERATOR_NAME
    per_outcome_counts: np.ndarray | None = None

    def __eq__(self, other):
        if not isinstance(other, SimResult):
            return NotImplemented
        same_counts = (
            (self.per_outcome_counts is None and other.per_outcome_counts is None)
            or (
                self.per_outcome_counts is not None
                and other.per_outcome_counts is not None
                and np.array_equal(self.per_outcome_counts, other.per_outcome_counts)
            )
        )
        return same_counts and (
            (self.trials, self.errors, self.empirical_error, self.std_error,
             self.seed, self.generator)
            == (other.trials, other.errors, other.empirical_error,
                other.std_error, other.seed, other.generator)
        )

    def to_json_dict(self) -> dict:
        return {
            "trials": self.trials,
            "errors": self.errors,
            "empirical_error": self.empirical_error,
            "std_error": self.std_error,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


def _shard_rng(seed: int, shard: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed & (2**64 - 1), spawn_key=(shard,))
    return np.random.Generator(np.random.Philox(ss))


def _decisions(policy: DecisionPolicy, idx: np.ndarray, n: int) -> np.ndarray:
    if policy.table is not None:
        return policy.table[idx]
    uniq, inverse = np.unique(idx, return_inverse=True)
    dec = np.fromiter(
        (policy.decide(index_to_outcome(int(i), n)) for i in uniq),
        dtype=np.uint8,
        count=uniq.size,
    )
    return dec[inverse]


def _run_stream(config, policies, collect_outcomes, workers):
    system = config.system
    n = system.n
    alphas, betas = system.alphas, system.betas
    rho1 = system.prior.rho1
    n_shards = (config.trials + SHARD_SIZE - 1) // SHARD_SIZE

    def run_shard(shard: int):
        start = shard * SHARD_SIZE
        count = min(SHARD_SIZE, config.trials - start)
        u = _shard_rng(config.seed, shard).random((count, n + 1))
        x, idx = _backend.sim_indices(u, alphas, betas, rho1)
        errs = [int(np.count_nonzero(_decisions(p, idx, n) != x)) for p in policies]
        counts = None
        if collect_outcomes:
            counts = np.bincount(idx, minlength=1 << n)
        return errs, counts

    if workers > 1 and n_shards > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            shard_results = list(pool.map(run_shard, range(n_shards)))
    else:
        shard_results = [run_shard(s) for s in range(n_shards)]

    errors = [0] * len(policies)
    total_counts = np.zeros(1 << n, dtype=np.int64) if collect_outcomes else None
    for errs, counts in shard_results:
        for i, e in enumerate(errs):
            errors[i] += e
        if collect_outcomes:
            total_counts += counts
    return errors, total_counts


def _result(config, errors, counts) -> SimResult:
    p_hat = errors / config.trials
    std = math.sqrt(p_hat * (1.0 - p_hat) / config.trials)
    return SimResult(
        trials=config.trials,
        errors=errors,
        empirical_error=p_hat,
        std_error=std,
        seed=config.seed,
        per_outcome_counts=counts,
    )


def _check_policy(config: SimConfig, policy: DecisionPolicy) -> None:
    if policy.system is not config.system and policy.system != config.system:
        raise ValueError("policy was built for a different system")


def simulate(
    config: SimConfig,
    policy: DecisionPolicy,
    *,
    collect_outcomes: bool = False,
    workers: int = 1,
) -> SimResult:
    """Estimate a policy's error rate over seeded trials.

    Each trial draws X from the prior, then each channel output given X,
    applies the policy and counts mismatches. Identical (seed, system,
    trials) produce identical results for any worker count.
    """
    _check_policy(config, policy)
    if collect_outcomes and config.system.n > _OUTCOME_HISTOGRAM_LIMIT:
        raise ValueError(
            f"outcome histograms capped at n={_OUTCOME_HISTOGRAM_LIMIT}"
        )
    errors, counts = _run_stream(config, [policy], collect_outcomes, workers)
    return _result(config, errors[0], counts)


def simulate_policy_comparison(
    config: SimConfig,
    policies: list[DecisionPolicy],
    *,
    workers: int = 1,
) -> list[SimResult]:
    """Evaluate several policies on one common stream of (X, Y) draws.

    All policies see the identical trial stream, so differences between the
    returned estimates reflect policy quality only.
    """
    if not policies:
        raise ValueError("need at least one policy")
    for p in policies:
        _check_policy(config, p)
    errors, _ = _run_stream(config, policies, False, workers)
    return [_result(config, e, None) for e in errors]
