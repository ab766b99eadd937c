import math

import numpy as np
import pytest

from biasfuse import (
    Channel,
    Prior,
    SizeGuardError,
    SystemSpec,
    bias_sweep,
    exact_error_probability,
    extreme_bias_floor,
    fully_biased_error,
    identical_error_probability,
    llr_rate_constrained_derivative,
    log_identical_error_probability,
    make_fully_biased_system,
    make_unbiased_system,
    random_system_with_rates,
    sweep_to_csv,
)
from _oracles import brute_force_error, brute_force_log_ratio, random_canonical_system

RHO6 = Prior.from_rho0(0.6)


class TestExactErrorProbability:
    def test_fig_configuration_fully_biased(self):
        # 0.6 * 0.5**5 exactly; enumeration must reproduce the closed form
        system = make_fully_biased_system(5, RHO6, np.full(5, 0.3))
        report = exact_error_probability(system)
        assert report.p_error == pytest.approx(0.01875, abs=1e-15)
        assert report.method == "enumeration"

    def test_fig_configuration_unbiased(self):
        # frozen from the independent 2**5 enumeration oracle
        system = make_unbiased_system(5, RHO6, 0.3)
        assert exact_error_probability(system).p_error == pytest.approx(
            0.16308, abs=1e-12
        )

    def test_single_channel(self):
        # min{0.18, 0.28} + min{0.42, 0.12} = 0.30
        system = make_unbiased_system(1, RHO6, 0.3)
        assert exact_error_probability(system).p_error == pytest.approx(0.30, abs=1e-15)

    def test_log_consistency(self):
        report = exact_error_probability(make_unbiased_system(4, RHO6, 0.25))
        assert math.exp(report.log_p_error) == pytest.approx(report.p_error, rel=1e-10)

    def test_zero_error_system(self):
        system = SystemSpec(RHO6, (Channel(0.0, 0.0),))
        report = exact_error_probability(system)
        assert report.p_error == 0.0
        assert report.log_p_error == -math.inf

    def test_size_guard(self):
        system = make_unbiased_system(25, RHO6, 0.3)
        with pytest.raises(SizeGuardError):
            exact_error_probability(system)

    def test_upper_bound_rho1(self):
        rng = np.random.default_rng(31)
        for _ in range(100):
            system = random_canonical_system(rng)
            p = exact_error_probability(system).p_error
            assert p <= system.prior.rho1 + 1e-15

    def test_non_canonical_systems_supported(self):
        rng = np.random.default_rng(32)
        for _ in range(30):
            n = int(rng.integers(1, 6))
            prior = Prior.from_rho0(float(rng.uniform(0.05, 0.95)))
            chans = tuple(
                Channel(float(rng.random()), float(rng.random())) for _ in range(n)
            )
            system = SystemSpec(prior, chans)
            assert exact_error_probability(system).p_error == pytest.approx(
                brute_force_error(system), abs=1e-13
            )


class TestIdenticalErrorProbability:
    def test_unbiased_five(self):
        report = identical_error_probability(5, RHO6, 0.3, 0.3)
        assert report.p_error == pytest.approx(0.16308, abs=1e-12)
        assert report.method == "binomial"

    def test_unbiased_four(self):
        # frozen from the 2**4 enumeration oracle
        assert identical_error_probability(4, RHO6, 0.3, 0.3).p_error == pytest.approx(
            0.18954, abs=1e-12
        )

    def test_all_s(self):
        assert identical_error_probability(5, RHO6, 0.5, 0.0).p_error == pytest.approx(
            0.01875, abs=1e-12
        )

    def test_agrees_with_enumeration(self):
        rng = np.random.default_rng(33)
        for _ in range(100):
            n = int(rng.integers(1, 17))
            rho0 = float(rng.uniform(0.05, 0.95))
            alpha = float(rng.random())
            beta = float(rng.random())
            prior = Prior.from_rho0(rho0)
            system = SystemSpec(prior, tuple(Channel(alpha, beta) for _ in range(n)))
            assert identical_error_probability(n, prior, alpha, beta).p_error == (
                pytest.approx(exact_error_probability(system).p_error, abs=1e-12)
            )


class TestLogIdenticalErrorProbability:
    def test_five_channels(self):
        report = log_identical_error_probability(5, RHO6, 0.3)
        assert report.log_p_error == pytest.approx(math.log(0.16308), abs=1e-12)
        assert report.method == "log-binomial"

    def test_pure_noise(self):
        report = log_identical_error_probability(1, Prior.from_rho0(0.5), 0.5)
        assert report.log_p_error == pytest.approx(math.log(0.5), abs=1e-12)

    def test_monotone_in_n(self):
        prev = 0.0
        for n in range(1, 60):
            value = log_identical_error_probability(n, RHO6, 0.3).log_p_error
            assert value <= prev + 1e-12
            prev = value

    def test_matches_direct_up_to_n300(self):
        rng = np.random.default_rng(34)
        for _ in range(40):
            n = int(rng.integers(1, 301))
            rho0 = float(rng.uniform(0.5, 0.95))
            r = float(rng.uniform(0.05, 0.5))
            prior = Prior.from_rho0(rho0)
            direct = identical_error_probability(n, prior, r, r)
            stable = log_identical_error_probability(n, prior, r)
            assert stable.log_p_error == pytest.approx(direct.log_p_error, abs=1e-9)

    def test_large_n_runs(self):
        report = log_identical_error_probability(1_000_000, RHO6, 0.3)
        assert report.log_p_error < -1000
        assert report.p_error == 0.0  # underflows; log form carries the value

    def test_rejects_bad_rate(self):
        with pytest.raises(ValueError):
            log_identical_error_probability(10, RHO6, 0.6)


class TestFullyBiasedError:
    def test_condition_holds(self):
        report = fully_biased_error(5, RHO6, np.full(5, 0.3))
        assert report.p_error == pytest.approx(0.01875, abs=1e-15)
        assert report.method == "closed-form"
        assert report.floor_condition is True

    def test_condition_fails(self):
        # floor 0.45 exceeds rho1 = 0.4; enumeration of the one-channel
        # S-system confirms the rho1 branch
        report = fully_biased_error(1, RHO6, [0.45])
        assert report.p_error == pytest.approx(0.4, abs=1e-15)
        assert report.floor_condition is False
        system = make_fully_biased_system(1, RHO6, [0.45])
        assert exact_error_probability(system).p_error == pytest.approx(0.4, abs=1e-12)

    def test_noiseless_channel_gives_zero(self):
        report = fully_biased_error(2, Prior.from_rho0(0.5), [0.0, 0.3])
        assert report.p_error == 0.0
        assert report.log_p_error == -math.inf

    def test_matches_enumeration(self):
        rng = np.random.default_rng(35)
        for _ in range(200):
            n = int(rng.integers(1, 7))
            prior = Prior.from_rho0(float(rng.uniform(0.5, 0.95)))
            rates = rng.uniform(0.0, 0.5, n)
            closed = fully_biased_error(n, prior, rates).p_error
            enum = exact_error_probability(
                make_fully_biased_system(n, prior, rates)
            ).p_error
            assert closed == pytest.approx(enum, abs=1e-12)

    def test_lower_bound_over_shared_rates(self):
        # min(floor, rho1) bounds every same-rate system; the raw product
        # floor additionally bounds it wherever the floor is <= rho1
        rng = np.random.default_rng(36)
        for _ in range(200):
            n = int(rng.integers(1, 7))
            prior = Prior.from_rho0(float(rng.uniform(0.5, 0.95)))
            rates = rng.uniform(0.02, 0.5, n)
            floor = extreme_bias_floor(prior, rates)
            fb = fully_biased_error(n, prior, rates).p_error
            system = random_system_with_rates(n, prior, rates, int(rng.integers(2**62)))
            p = exact_error_probability(system).p_error
            assert p >= fb - 1e-12
            if floor <= prior.rho1:
                assert p >= floor - 1e-12


class TestBiasSweep:
    def test_three_point_example(self):
        # oracle: 4-outcome enumeration at alpha2 in {0, 0.3, 0.5} gives
        # P_e = {0.30, 0.21, 0.15}; the sweep endpoints match the extremes.
        base = SystemSpec(RHO6, (Channel(0.5, 0.0), Channel(0.3, 0.3)))
        for a2, expected in ((0.0, 0.30), (0.3, 0.21), (0.5, 0.15)):
            b2 = (0.3 - 0.6 * a2) / 0.4
            system = base.with_channel(1, Channel(a2, b2))
            assert exact_error_probability(system).p_error == pytest.approx(
                expected, abs=1e-12
            )
        sweep = bias_sweep(base, 1, 3)
        assert sweep.alpha_grid[0] == pytest.approx(0.0)
        assert sweep.alpha_grid[-1] == pytest.approx(0.5)
        assert sweep.p_error_at[0] == pytest.approx(0.30, abs=1e-12)
        assert sweep.p_error_at[-1] == pytest.approx(0.15, abs=1e-12)
        assert sweep.max_positive_second_difference() <= 1e-9

    def test_grid_span(self):
        rng = np.random.default_rng(37)
        for _ in range(30):
            system = random_canonical_system(rng, n=3)
            k = int(rng.integers(3))
            rk = system.rates()[k]
            sweep = bias_sweep(system, k, 11)
            rho0, rho1 = system.prior.rho0, system.prior.rho1
            assert sweep.alpha_grid[0] == pytest.approx(max(0.0, (rk - rho1) / rho0))
            assert sweep.alpha_grid[-1] == pytest.approx(rk / rho0)
            # the swept channel's rate is pinned at every grid point
            recon = rho0 * sweep.alpha_grid + rho1 * sweep.beta_grid
            assert np.allclose(recon, rk, atol=1e-12)

    def test_concave_and_endpoint_minimum(self):
        rng = np.random.default_rng(38)
        for _ in range(50):
            system = random_canonical_system(rng, max_n=5)
            k = int(rng.integers(system.n))
            sweep = bias_sweep(system, k, 31)
            assert sweep.max_positive_second_difference() <= 1e-9
            assert sweep.min_is_at_endpoint()

    def test_local_max_point(self):
        # rho0=0.6, r=0.45 >= rho1: the crossing alpha (0.45-0.4)/0.2 = 0.25
        # is a grid member and carries error >= both feasibility endpoints
        system = random_system_with_rates(1, RHO6, [0.45], seed=3)
        sweep = bias_sweep(system, 0, 5)
        assert sweep.local_max_alpha == pytest.approx(0.25)
        j = sweep.local_max_index
        assert sweep.alpha_grid[j] == pytest.approx(0.25)
        assert sweep.p_error_at[j] >= sweep.p_error_at[0] - 1e-12
        assert sweep.p_error_at[j] >= sweep.p_error_at[-1] - 1e-12
        # 2-outcome enumeration oracle: P_e is 0.4 across the interval here
        assert sweep.p_error_at[j] == pytest.approx(0.4, abs=1e-12)

    def test_local_max_inserted_when_off_grid(self):
        system = random_system_with_rates(2, Prior.from_rho0(0.8), [0.45, 0.3], seed=7)
        sweep = bias_sweep(system, 0, 10)
        expected = (0.45 - 0.2) / (0.8 - 0.2)
        assert sweep.local_max_alpha == pytest.approx(expected)
        assert len(sweep.alpha_grid) == 11  # inserted as an extra member
        j = sweep.local_max_index
        assert sweep.alpha_grid[j] == pytest.approx(expected)
        if 0 < j < len(sweep.alpha_grid) - 1:
            assert sweep.p_error_at[j] >= sweep.p_error_at[j - 1] - 1e-12
            assert sweep.p_error_at[j] >= sweep.p_error_at[j + 1] - 1e-12

    def test_no_local_max_below_rho1(self):
        system = random_system_with_rates(1, RHO6, [0.3], seed=1)
        sweep = bias_sweep(system, 0, 5)
        assert sweep.local_max_alpha is None

    def test_rejects_bad_grid(self):
        system = make_unbiased_system(2, RHO6, 0.3)
        with pytest.raises(ValueError):
            bias_sweep(system, 0, 2)

    def test_rejects_non_canonical(self):
        system = SystemSpec(RHO6, (Channel(0.9, 0.9),))
        with pytest.raises(ValueError):
            bias_sweep(system, 0, 5)

    def test_csv_export(self):
        system = make_unbiased_system(2, RHO6, 0.3)
        text = sweep_to_csv(bias_sweep(system, 0, 3))
        lines = text.strip().split("\n")
        assert lines[0] == "alpha_k,beta_k,p_error"
        assert len(lines) == 4
        first = lines[1].split(",")
        assert len(first) == 3
        assert float(first[2]) > 0


class TestLlrRateConstrainedDerivative:
    def _single(self, alpha, beta, rho0=0.6):
        return SystemSpec(Prior.from_rho0(rho0), (Channel(alpha, beta),))

    def test_reported_one(self):
        # (rho1 - r) / (rho1 * alpha * (1 - beta)) with r = 0.32
        value = llr_rate_constrained_derivative(self._single(0.4, 0.2), 0, (1,))
        assert value == pytest.approx(0.625, abs=1e-12)

    def test_reported_zero(self):
        value = llr_rate_constrained_derivative(self._single(0.4, 0.2), 0, (0,))
        assert value == pytest.approx(0.28 / 0.048, abs=1e-12)

    def test_symmetric_sign(self):
        for r in (0.1, 0.3, 0.45):
            system = SystemSpec(Prior.from_rho0(0.5), (Channel(r, r),))
            value = llr_rate_constrained_derivative(system, 0, (1,))
            assert value == pytest.approx((0.5 - r) / (0.5 * r * (1 - r)), abs=1e-12)
            assert value > 0

    def test_rejects_boundary(self):
        with pytest.raises(ValueError):
            llr_rate_constrained_derivative(self._single(0.5, 0.0), 0, (1,))

    def test_matches_finite_difference(self):
        rng = np.random.default_rng(39)
        h = 1e-6
        for _ in range(100):
            n = int(rng.integers(1, 4))
            rho0 = float(rng.uniform(0.52, 0.9))
            prior = Prior.from_rho0(rho0)
            chans = []
            for _ in range(n):
                while True:
                    a = float(rng.uniform(0.05, 0.95))
                    b = float(rng.uniform(0.05, 0.95))
                    r = rho0 * a + prior.rho1 * b
                    # keep the derivative away from its zeros so the
                    # relative-error comparison is well posed
                    if abs(r - prior.rho1) > 1e-2 and abs(r - rho0) > 1e-2:
                        break
                chans.append(Channel(a, b))
            system = SystemSpec(prior, tuple(chans))
            k = int(rng.integers(n))
            y = tuple(int(v) for v in rng.integers(0, 2, n))
            analytic = llr_rate_constrained_derivative(system, k, y)
            slope = rho0 / prior.rho1
            ch = system.channels[k]
            up = system.with_channel(k, Channel(ch.alpha + h, ch.beta - h * slope))
            dn = system.with_channel(k, Channel(ch.alpha - h, ch.beta + h * slope))
            fd = (brute_force_log_ratio(up, y) - brute_force_log_ratio(dn, y)) / (2 * h)
            assert abs(analytic - fd) <= 1e-5 * max(abs(analytic), abs(fd))


class TestPathConsistency:
    def test_three_routes_agree(self):
        rng = np.random.default_rng(40)
        for _ in range(60):
            n = int(rng.integers(1, 17))
            rho0 = float(rng.uniform(0.5, 0.95))
            r = float(rng.uniform(0.02, 0.5))
            prior = Prior.from_rho0(rho0)
            system = make_unbiased_system(n, prior, r)
            p_enum = exact_error_probability(system).p_error
            p_binom = identical_error_probability(n, prior, r, r).p_error
            log_stable = log_identical_error_probability(n, prior, r).log_p_error
            assert abs(p_enum - p_binom) <= 1e-10
            assert abs(math.log(p_enum) - log_stable) <= 1e-9
