"""Tests for the series expansion engine."""

from __future__ import annotations

import csv
import io
import math
import random

import pytest
from mpmath import mp

from refined_dt.asym import log_of_int, wright_pn
from refined_dt.const import METHOD_FACTORS, METHOD_LAYERS, RING_INTEGER, RING_JET, RING_LAURENT
from refined_dt.errors import ExpansionCapError
from refined_dt.expand import (
    TSeries,
    evaluate_real,
    expand_F2,
    expand_float_jet,
    expand_M_delta,
    expand_macmahon,
    expand_moment_layers,
    factor_exponent,
    mul_geometric_factor,
    second_moment_series,
    series_to_csv,
)
from refined_dt.qseries import LaurentPoly, mirror

from .conftest import ORACLE_SUMS, PLANE_PARTITION_COUNTS

SIGMA2 = 0.7464745273805173


class TestFactorExponent:
    """Test factor_exponent."""

    @pytest.mark.parametrize(
        ("delta", "m", "k", "expected"),
        [(0, 1, 0, 0), (0, 2, 0, -1), (0, 2, 1, 1), (3, 1, 0, 3), (1, 3, 2, 3)],
    )
    def test_values(self, delta, m, k, expected):
        """Test delta + 2k + 1 - m."""
        assert factor_exponent(delta, m, k) == expected


class TestMulGeometricFactor:
    """Test mul_geometric_factor."""

    def test_geometric_series(self):
        """Test 1/(1 - t^2) applied to 1."""
        series = TSeries((1, 0, 0, 0, 0), RING_INTEGER)

        assert mul_geometric_factor(series, 1, 2).coeffs == (1, 0, 1, 0, 1)

    def test_period_must_be_positive(self):
        """Test m < 1 is rejected."""
        with pytest.raises(ValueError):
            mul_geometric_factor(TSeries((1,), RING_INTEGER), 1, 0)


class TestExpandMDelta:
    """Test expand_M_delta over the Laurent ring."""

    def test_n3_delta0(self):
        """Test [t^3] = q^-2 + q^-1 + 2 + q + q^2."""
        series = expand_M_delta(0, 3)

        assert series[3] == LaurentPoly({-2: 1, -1: 1, 0: 2, 1: 1, 2: 1})
        assert series[0] == LaurentPoly.one()

    def test_n_max_zero(self):
        """Test a zero truncation holds only the constant term."""
        series = expand_M_delta(0, 0)

        assert series.coeffs == (LaurentPoly.one(),)

    @pytest.mark.parametrize(
        ("delta", "n", "terms"),
        [
            (1, 2, {0: 1, 2: 2}),
            (1, 3, {-1: 1, 1: 2, 3: 3}),
            (1, 4, {-2: 1, 0: 3, 2: 4, 4: 5}),
            (3, 2, {2: 1, 4: 1, 6: 1}),
            (3, 3, {1: 1, 3: 1, 5: 2, 7: 1, 9: 1}),
            (0, 4, {-3: 1, -2: 2, -1: 2, 0: 3, 1: 2, 2: 2, 3: 1}),
        ],
    )
    def test_refined_coefficients(self, delta, n, terms):
        """Test coefficients produced by brute-force enumeration."""
        assert expand_M_delta(delta, n)[n] == LaurentPoly(terms)

    def test_n8_delta0(self):
        """Test the full q-distribution at n = 8."""
        expected = {
            -7: 1, -6: 4, -5: 6, -4: 11, -3: 13, -2: 17, -1: 18, 0: 20,
            1: 18, 2: 17, 3: 13, 4: 11, 5: 6, 6: 4, 7: 1,
        }  # fmt: skip

        assert expand_M_delta(0, 8)[8] == LaurentPoly(expected)

    def test_half_power(self):
        """Test [t^1] of M_3(t, q^{1/2}) is q^{3/2}."""
        series = expand_M_delta(3, 1, half_power=True)

        assert series[1] == LaurentPoly.monomial(3, half_power=True)
        assert series.half_power

    def test_delta0_mirror_symmetric(self):
        """Test p_n(1/q) = p_n(q) when delta = 0."""
        series = expand_M_delta(0, 10)

        for coeff in series.coeffs:
            assert mirror(coeff) == coeff

    def test_counts_at_q_equal_one(self):
        """Test p_n(1) matches the plane-partition counts through n = 14."""
        series = expand_M_delta(0, 14)

        assert tuple(c.evaluate(1) for c in series.coeffs) == PLANE_PARTITION_COUNTS[:15]

    def test_integer_ring(self):
        """Test the integer ring gives the counts directly."""
        assert expand_M_delta(2, 10, RING_INTEGER).coeffs == PLANE_PARTITION_COUNTS[:11]

    def test_invalid_inputs(self):
        """Test rejected parameters."""
        with pytest.raises(ValueError):
            expand_M_delta(-1, 3)
        with pytest.raises(ValueError):
            expand_M_delta(0, -1)
        with pytest.raises(ValueError):
            expand_M_delta(0, 3, RING_JET, half_power=True)
        with pytest.raises(ValueError):
            expand_M_delta(0, 3, "matrix")

    @pytest.mark.parametrize(("ring", "kwargs"), [(RING_LAURENT, {}), (RING_JET, {"order": 4})])
    def test_restrict_matches_shorter_expansion(self, ring, kwargs):
        """Test expanding to N then restricting to M equals expanding to M."""
        long = expand_M_delta(2, 15, ring, **kwargs)

        for m in (0, 5, 14, 15):
            assert long.restrict(m) == expand_M_delta(2, m, ring, **kwargs)
        with pytest.raises(ValueError):
            long.restrict(16)

    @pytest.mark.parametrize("seed", range(3))
    def test_factor_order_irrelevant(self, seed):
        """Test multiplying the factors in a shuffled order gives the same series."""
        n_max, delta = 8, 1
        factors = [(m, factor_exponent(delta, m, k)) for m in range(1, n_max + 1) for k in range(m)]
        random.Random(seed).shuffle(factors)
        series = TSeries((LaurentPoly.one(),) + (LaurentPoly.zero(),) * n_max, RING_LAURENT)
        for m, exponent in factors:
            series = mul_geometric_factor(series, LaurentPoly.monomial(exponent), m)

        assert series == expand_M_delta(delta, n_max)

    def test_cap(self):
        """Test the truncation cap."""
        with pytest.raises(ExpansionCapError) as err:
            expand_M_delta(0, 50, RING_LAURENT, cap=40)

        assert err.value.n_max == 50
        assert err.value.cap == 40


class TestMacMahon:
    """Test expand_macmahon."""

    def test_integer_counts(self):
        """Test the sigma_2 recurrence against known counts."""
        assert expand_macmahon(20).coeffs == PLANE_PARTITION_COUNTS

    def test_float_ring(self):
        """Test the float ring agrees with the integers."""
        floats = expand_macmahon(20, "float").coeffs

        assert floats == pytest.approx([float(c) for c in PLANE_PARTITION_COUNTS], rel=1e-12)

    def test_unknown_ring(self):
        """Test an unknown ring mode."""
        with pytest.raises(ValueError):
            expand_macmahon(5, RING_LAURENT)


class TestSecondMoment:
    """Test F_2 and the second-moment series."""

    def test_f2_first_terms(self):
        """Test F_2 = 2t^2 + 8t^3 + ..."""
        f2 = expand_F2(4).coeffs

        assert f2[:4] == (0, 0, 2, 8)
        assert f2[4] == 2 * 2 + 20

    def test_spot_values(self):
        """Test [t^2] = 2 and [t^3] = 10."""
        series = second_moment_series(3)

        assert series[2] == 2
        assert series[3] == 10

    def test_matches_oracle(self):
        """Test F_2 * M against enumerated sums of (w+ - w-)^2."""
        series = second_moment_series(12)

        for n, sums in ORACLE_SUMS.items():
            assert series[n] == sums[1]

    def test_matches_jets(self):
        """Test F_2 * M against the second jet entry."""
        series = second_moment_series(100)
        jets = expand_moment_layers(0, 100, 2)

        assert [jet[2] for jet in jets.coeffs] == list(series.coeffs)


class TestMomentLayers:
    """Test the derivative-layer expansion of jets."""

    @pytest.mark.parametrize("delta", [0, 1, 3])
    def test_agrees_with_factors(self, delta):
        """Test layers and factor-by-factor jets agree exactly."""
        factors = expand_M_delta(delta, 40, RING_JET, order=6, method=METHOD_FACTORS)
        layers = expand_M_delta(delta, 40, RING_JET, order=6, method=METHOD_LAYERS)

        assert factors.coeffs == layers.coeffs

    def test_agrees_with_laurent(self):
        """Test jets against derivatives of the exact Laurent coefficients."""
        laurent = expand_M_delta(1, 12)
        jets = expand_moment_layers(1, 12, 4)

        for poly, jet in zip(laurent.coeffs, jets.coeffs, strict=True):
            assert jet.coeffs == tuple(
                sum(c * e**j for e, c in poly.terms.items()) for j in range(5)
            )

    def test_odd_moments_vanish(self):
        """Test odd derivatives are exactly zero for delta = 0."""
        jets = expand_moment_layers(0, 512, 7)

        for jet in jets.coeffs:
            assert jet[1] == jet[3] == jet[5] == jet[7] == 0

    @pytest.mark.slow
    def test_odd_moments_vanish_large(self):
        """Test odd derivatives vanish through n = 4096."""
        jets = expand_moment_layers(0, 4096, 7)

        assert all(jet[k] == 0 for jet in jets.coeffs for k in (1, 3, 5, 7))

    def test_negative_order(self):
        """Test a negative order is rejected."""
        with pytest.raises(ValueError):
            expand_moment_layers(0, 5, -1)


class TestFloatJet:
    """Test expand_float_jet."""

    def test_matches_exact_ratios(self):
        """Test float layers reproduce exact moment ratios."""
        exact = expand_moment_layers(0, 300, 4)
        floats = expand_float_jet(0, 300, 4)

        for n in (50, 150, 300):
            jet = exact[n]
            assert floats.moment_ratio(n, 2) == pytest.approx(jet[2] / jet[0], rel=1e-9)
            assert floats.moment_ratio(n, 4) == pytest.approx(jet[4] / jet[0], rel=1e-9)
            assert floats.log_count(n) == pytest.approx(log_of_int(jet[0]), rel=1e-12)

    def test_shape(self):
        """Test the layer array dimensions."""
        floats = expand_float_jet(1, 20, 3)

        assert floats.n_max == 20
        assert floats.order == 3
        assert floats.delta == 1

    def test_mantissas_normalized(self):
        """Test every column is stored relative to its own count."""
        floats = expand_float_jet(0, 200, 2)

        assert floats.layers[0] == pytest.approx(1.0, rel=1e-15)
        assert floats.log_offset[200] == pytest.approx(floats.log_count(200), rel=1e-15)
        assert floats.log_count(20) == pytest.approx(math.log(PLANE_PARTITION_COUNTS[20]), rel=1e-13)

    @pytest.mark.slow
    def test_beyond_double_range(self):
        """Test n_max = 40000, where p_n itself is far beyond double range, expands without overflow."""
        n = 40_000
        floats = expand_float_jet(0, n, 2)

        assert floats.log_count(n) > 2000
        assert floats.log_count(n) == pytest.approx(wright_pn(n, log_scale=True), abs=0.05)
        assert 0.744 < floats.moment_ratio(n, 2) / n ** (4 / 3) < SIGMA2


class TestEvaluateReal:
    """Test evaluate_real."""

    def test_macmahon_at_point(self):
        """Test the truncated series against the product at t = 0.1."""
        series = expand_macmahon(60)
        with mp.workdps(40):
            product = mp.fprod((1 - mp.mpf("0.1") ** m) ** (-m) for m in range(1, 200))
            value = evaluate_real(series, "0.1")

            assert abs(value - product) < mp.mpf(10) ** -30


class TestSeriesToCsv:
    """Test series_to_csv."""

    def test_laurent_rows(self):
        """Test n plus the JSON coefficient per row."""
        rows = list(csv.reader(io.StringIO(series_to_csv(expand_M_delta(0, 2)))))

        assert rows[0] == ["n", "coefficient"]
        assert rows[1] == ["0", '[[0,"1"]]']
        assert rows[3] == ["2", '[[-1,"1"],[0,"1"],[1,"1"]]']

    def test_jet_rows(self):
        """Test one column per derivative order."""
        rows = list(csv.reader(io.StringIO(series_to_csv(expand_moment_layers(0, 2, 2)))))

        assert rows[0] == ["n", "d0", "d1", "d2"]
        assert rows[3] == ["2", "3", "0", "2"]

    def test_scalar_rows(self):
        """Test integer series."""
        text = series_to_csv(expand_macmahon(2))

        assert text == "n,value\n0,1\n1,1\n2,3\n"
