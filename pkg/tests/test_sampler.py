"""Tests for the conditioned sampler."""

from __future__ import annotations

import math
from collections import Counter

import numpy as np
import pytest

from refined_dt.asym import CONSTANTS, saddle_N
from refined_dt.errors import AcceptanceCollapseError
from refined_dt.expand import expand_float_jet
from refined_dt.moments import chi_square_test, distribution_table
from refined_dt.sampler import (
    SampleRecord,
    SamplerConfig,
    acceptance_rate_estimate,
    compute_m_max,
    draw_once,
    exact_conditional_law,
    expected_size,
    sample_conditioned,
    trace_proxy_matches_oracle,
    worker_generators,
)


def _tail_beyond(radius, m_max, horizon=20_000):
    m = np.arange(m_max + 1, horizon, dtype=np.float64)
    return float(np.sum(m * m * np.exp(-m / radius) / -np.expm1(-m / radius)))


class TestCutoff:
    """Test compute_m_max and expected_size."""

    @pytest.mark.parametrize("radius", [0.5, 2.0, 7.3, 16.0])
    def test_tail_below_threshold(self, radius):
        """Test M is the first cutoff whose neglected size is below the tail."""
        m_max = compute_m_max(radius, 1e-9)

        assert _tail_beyond(radius, m_max) < 1e-9
        if m_max > 1:
            assert _tail_beyond(radius, m_max - 1) >= 1e-9

    def test_grows_with_radius(self):
        """Test larger radii need more periods."""
        assert compute_m_max(2.0) < compute_m_max(4.0) < compute_m_max(8.0)

    def test_rejects_non_positive_radius(self):
        """Test radius <= 0."""
        with pytest.raises(ValueError):
            compute_m_max(0.0)

    def test_expected_size_leading(self):
        """Test the unconditioned mean size is close to 2 zeta(3) N^3."""
        radius = 16.0

        assert expected_size(radius, compute_m_max(radius)) == pytest.approx(
            2 * CONSTANTS.zeta3 * radius**3, rel=1e-3
        )


class TestSamplerConfig:
    """Test SamplerConfig defaults and validation."""

    def test_saddle_default(self):
        """Test the radius defaults to the saddle radius."""
        config = SamplerConfig(n=10**4, window=10**6)

        assert config.radius == pytest.approx(16.082306170137, rel=1e-11)
        assert config.periods == compute_m_max(config.radius)

    def test_m_max_capped_by_window(self):
        """Test periods beyond n + window are dropped."""
        assert SamplerConfig(n=6, radius_N=10.0).periods == 6
        assert SamplerConfig(n=6, radius_N=10.0, window=3).periods == 9
        assert SamplerConfig(n=0).periods == 1

    def test_explicit_m_max(self):
        """Test an explicit cutoff is kept."""
        assert SamplerConfig(n=6, m_max=40).periods == 40

    @pytest.mark.parametrize(
        "kwargs",
        [{"n": -1}, {"n": 5, "window": -1}, {"n": 5, "workers": 0}, {"n": 5, "radius_N": -1.0}, {"n": 5, "m_max": 0}],
    )
    def test_invalid(self, kwargs):
        """Test rejected parameters."""
        with pytest.raises(ValueError):
            SamplerConfig(**kwargs)

    def test_as_dict(self):
        """Test the effective parameters carry the computed cutoff."""
        values = SamplerConfig(n=6, radius_N=2.0, seed=4).as_dict()

        assert values["m_max"] == 6
        assert values["radius_N"] == 2.0
        assert values["seed"] == 4

    def test_accepts(self):
        """Test the acceptance window."""
        config = SamplerConfig(n=10, window=2)

        assert config.accepts(8) and config.accepts(12)
        assert not config.accepts(13)


class TestDrawOnce:
    """Test per-factor draws."""

    def test_vanishing_radius(self):
        """Test a tiny radius gives the empty partition."""
        record = draw_once(SamplerConfig(n=5, radius_N=1e-3), np.random.default_rng(0))

        assert record == SampleRecord(size=0, stat=0, trace_proxy=0)

    @pytest.mark.slow
    def test_mean_size(self):
        """Test the sample mean size against the exact unconditioned mean."""
        config = SamplerConfig(n=10**6, radius_N=2.0)
        rng = np.random.default_rng(12345)
        sizes = np.array([draw_once(config, rng).size for _ in range(3000)], dtype=np.float64)
        expected = expected_size(config.radius, config.periods)

        assert abs(sizes.mean() - expected) < 5 * sizes.std(ddof=1) / math.sqrt(sizes.size)

    def test_records_are_consistent(self):
        """Test trace and stat are bounded by the size."""
        config = SamplerConfig(n=10**6, radius_N=1.5)
        rng = np.random.default_rng(7)
        for _ in range(200):
            record = draw_once(config, rng)
            assert 0 <= record.trace_proxy <= record.size
            assert abs(record.stat) <= record.size
            assert (record.stat - record.size + record.trace_proxy) % 2 == 0


class TestSampleConditioned:
    """Test the conditioned sampler."""

    def test_n2_law(self):
        """Test the three partitions of size 2 appear uniformly with the right trace."""
        config = SamplerConfig(n=2, target_accepted=3000, seed=1)
        records = list(sample_conditioned(config))

        assert len(records) == 3000
        assert all(r.size == 2 for r in records)
        assert all(r.trace_proxy == 2 - abs(r.stat) for r in records)
        observed = Counter(r.stat for r in records)
        _, pvalue = chi_square_test(distribution_table(2), observed)
        assert pvalue > 1e-4

    @pytest.mark.parametrize("radius", [1.5, 2.5])
    def test_radius_invariance(self, radius):
        """Test the conditioned law at n = 6 does not depend on the radius."""
        config = SamplerConfig(n=6, radius_N=radius, target_accepted=6000, seed=5)
        observed = Counter(r.stat for r in sample_conditioned(config))
        _, pvalue = chi_square_test(distribution_table(6), observed)

        assert pvalue > 1e-4

    @pytest.mark.slow
    def test_n8_chi_square(self):
        """Test 10^5 draws at n = 8 against the exact pmf."""
        config = SamplerConfig(n=8, target_accepted=100_000, seed=8, attempt_budget=50_000_000)
        records = list(sample_conditioned(config))
        observed = Counter(r.stat for r in records)
        _, pvalue = chi_square_test(distribution_table(8), observed)

        assert pvalue > 1e-4
        assert abs(np.mean([r.stat for r in records])) < 0.05

    def test_deterministic(self):
        """Test identical configs give identical records and seeds matter."""
        config = SamplerConfig(n=5, target_accepted=200, seed=42)

        first = list(sample_conditioned(config))
        assert first == list(sample_conditioned(config))
        assert first != list(sample_conditioned(SamplerConfig(n=5, target_accepted=200, seed=43)))

    def test_workers(self):
        """Test worker order, counters and reproducibility with three workers."""
        config = SamplerConfig(n=5, target_accepted=301, seed=3, workers=3)
        records = list(sample_conditioned(config))

        assert len(records) == 301
        assert [r.worker for r in records] == sorted(r.worker for r in records)
        assert Counter(r.worker for r in records) == {0: 101, 1: 100, 2: 100}
        for worker in range(3):
            counters = [r.counter for r in records if r.worker == worker]
            assert counters == sorted(counters)
            assert len(set(counters)) == len(counters)
        assert records == list(sample_conditioned(config))

    def test_worker_streams_independent(self):
        """Test spawned generators differ."""
        a, b = worker_generators(0, 2)

        assert a.random() != b.random()

    def test_collapse(self, caplog):
        """Test an unreachable size exhausts the budget."""
        config = SamplerConfig(n=50, radius_N=0.2, target_accepted=10, attempt_budget=1000, batch_size=256)

        with pytest.raises(AcceptanceCollapseError) as err:
            list(sample_conditioned(config))

        assert err.value.accepted == 0
        assert err.value.summary.attempts == 1000
        assert err.value.summary.maximum < 50
        assert "collected 0 of 10" in caplog.text

    def test_window_warns(self, caplog):
        """Test windowed runs are flagged as approximate."""
        config = SamplerConfig(n=10, window=1, target_accepted=20)
        records = list(sample_conditioned(config))

        assert all(9 <= r.size <= 11 for r in records)
        assert "approximate" in caplog.text

    @pytest.mark.slow
    def test_variance_matches_exact_moment(self):
        """Test the variance of (w+ - w-)/n^{2/3} at n = 10^4 within three standard errors of m_2."""
        n = 10**4
        config = SamplerConfig(n=n, target_accepted=2000, seed=2, workers=4)
        x = np.array([r.stat for r in sample_conditioned(config)], dtype=np.float64) / n ** (2 / 3)
        exact = expand_float_jet(0, n, 2).moment_ratio(n, 2) / n ** (4 / 3)

        variance = x.var(ddof=1)
        fourth = np.mean((x - x.mean()) ** 4)
        stderr = math.sqrt((fourth - variance**2) / x.size)
        assert exact == pytest.approx(0.744, abs=0.005)
        assert abs(variance - exact) < 3 * stderr


class TestAcceptance:
    """Test the pilot acceptance estimate."""

    def test_decays_with_n(self):
        """Test the saddle-radius acceptance rate falls as n grows."""
        rates = [acceptance_rate_estimate(SamplerConfig(n=n, seed=9)) for n in (20, 100, 500)]

        assert rates[0] > rates[1] > rates[2] > 0

    def test_window_raises_rate(self):
        """Test a wider window accepts more."""
        narrow = acceptance_rate_estimate(SamplerConfig(n=100, seed=9))
        wide = acceptance_rate_estimate(SamplerConfig(n=100, seed=9, window=10))

        assert wide > narrow

    @pytest.mark.parametrize("scale", [0.5, 2.0])
    def test_saddle_radius_is_best(self, scale):
        """Test radii half and double the saddle radius accept less often."""
        n = 100
        saddle = acceptance_rate_estimate(SamplerConfig(n=n, seed=9))
        detuned = acceptance_rate_estimate(SamplerConfig(n=n, radius_N=scale * saddle_N(n), seed=9))

        assert detuned < saddle


class TestExactLaw:
    """Test the trace proxy against enumeration."""

    @pytest.mark.parametrize("n", range(9))
    def test_trace_proxy_matches_oracle(self, n):
        """Test (stat, total multiplicity) has the law of (w+ - w-, w0)."""
        assert trace_proxy_matches_oracle(n)

    def test_total_mass(self):
        """Test the multiplicity vectors of size 5 number p_5."""
        assert sum(exact_conditional_law(5).values()) == 24

    def test_negative(self):
        """Test negative sizes."""
        with pytest.raises(ValueError):
            exact_conditional_law(-1)
