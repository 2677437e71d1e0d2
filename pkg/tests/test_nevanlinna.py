"""Tests for the Nevanlinna estimates in src/nevanlinna.py."""

import cmath
import math

import numpy as np
import pytest

from src.classifier import classify
from src.errors import ParameterError, UndefinedError
from src.expsum import ExpSum, PolyC
from src.fixtures import get_fixture
from src.nevanlinna import (
    _fit_orders,
    characteristic,
    characteristic_profile,
    count_zeros,
    counting,
    counting_function,
    locate_zeros,
    order_estimates,
    proximity,
    proximity_estimate,
    simple_zero_report,
    zero_count,
)

PI_I = math.pi * 1j
F4_ZERO_HEIGHT = math.log((math.sqrt(6) + math.sqrt(2)) / 2) / math.pi  # 0.2097...


def exp_term(coeff, freq):
    return ExpSum.exponential(coeff, freq)


class TestProximity:
    def test_single_exponential(self):
        """m(r, e^{πiz}) = r."""
        assert proximity(exp_term(1, PI_I), 10) == pytest.approx(10.0, abs=0.01)

    def test_constant_one(self):
        assert proximity(ExpSum.constant(1), 7) == 0

    def test_cosine_self_consistent(self, two_cos):
        """Coarse and fine quadrature agree."""
        coarse, _ = proximity_estimate(two_cos, 20, 256)
        fine, _ = proximity_estimate(two_cos, 20, 4096)
        assert coarse == pytest.approx(fine, rel=1e-4)
        assert fine == pytest.approx(40.0, rel=0.01)  # T(r, 2cos πz) = 2r

    def test_constants_are_exact(self):
        """Constants skip sampling altogether."""
        assert proximity_estimate(ExpSum.constant(5), 3) == (math.log(5), None)
        assert proximity_estimate(ExpSum.constant(-0.5j), 3) == (0.0, None)

    def test_small_function_stops_without_warning(self):
        """|f| < 1 on the circle gives m = 0 before the node cap is reached."""
        f = ExpSum.from_poly(PolyC((0.1, 0.1)))
        assert proximity_estimate(f, 1, 256, max_nodes=2**20) == (0.0, None)

    def test_node_cap_warns(self, two_cos):
        """An unreachable tolerance stops at the cap with a warning."""
        value, warning = proximity_estimate(two_cos, 20, 256, max_nodes=512, rtol=1e-15)
        assert warning is not None
        assert value > 0

    def test_rejects_nonpositive_radius(self, two_cos):
        with pytest.raises(ParameterError):
            proximity(two_cos, 0)


class TestCharacteristic:
    def test_many_zeros_solution(self, f4):
        assert 1.9 <= characteristic(f4, 50) / 50 <= 2.1

    def test_triple_frequency(self):
        """T(r, e^{3πiz}) = 3r."""
        for r in (10, 40):
            assert characteristic(exp_term(1, 3 * PI_I), r) / r == pytest.approx(3.0, abs=0.05)

    def test_constant(self):
        assert characteristic(ExpSum.constant(0.5), 30) == 0

    @pytest.mark.parametrize("r", [10, 30, 100])
    def test_growth_law(self, r, rng):
        """T(r, c·e^{αz}) = |α|r/π for |c| = 1."""
        for _ in range(5):
            alpha = complex(*rng.uniform(-3, 3, 2))
            c = cmath.exp(1j * rng.uniform(0, 2 * math.pi))
            ratio = characteristic(exp_term(c, alpha), r) * math.pi / (abs(alpha) * r)
            assert 0.99 <= ratio <= 1.01

    def test_huge_radius_does_not_overflow(self):
        """Scaled evaluation keeps large radii finite."""
        assert characteristic(exp_term(1, 10), 1000) == pytest.approx(10000 / math.pi, rel=1e-4)


class TestZeroCount:
    def test_cosine_half_integers(self, two_cos):
        """Zeros of 2cos πz sit at the half integers."""
        assert zero_count(two_cos, 5.2) == 10

    @pytest.mark.parametrize("r", [0.5, 3.3, 40.0])
    def test_exponential_has_no_zeros(self, r):
        assert zero_count(exp_term(1, PI_I), r) == 0

    def test_constant_has_no_zeros(self):
        assert zero_count(ExpSum.constant(5), 12) == 0

    def test_polynomial_zeros(self):
        f = ExpSum.from_poly(PolyC((-1, 0, 0, 1)))  # z³ − 1
        assert zero_count(f, 0.5) == 0
        assert zero_count(f, 2) == 3

    def test_zero_function_undefined(self):
        with pytest.raises(UndefinedError):
            zero_count(ExpSum.zero(), 1)

    def test_zero_on_contour_nudges_radius(self, two_cos):
        """A zero on |z| = r moves the contour outward."""
        result = count_zeros(two_cos, 4.5)
        assert result.nudged
        assert result.radius > 4.5
        assert result.count == 10

    def test_many_zeros_solution(self, f4):
        # zeros at 2k + 0.21i and 2k + 1 − 0.21i
        assert zero_count(f4, 3) == 5

    def test_integrality(self, two_cos, f4, rng):
        """The winding number lands on an integer."""
        for f in (two_cos, f4):
            for r in rng.uniform(0.7, 12, 10):
                result = count_zeros(f, float(r))
                assert abs(result.winding - result.count) <= 1e-3

    @pytest.mark.slow
    def test_monotone_in_radius(self, two_cos, f4, rng):
        """n(r) never decreases."""
        candidates = [two_cos, f4, exp_term(1, 1) - 1 + ExpSum.from_poly(PolyC.z())]
        for sweep in range(20):
            f = candidates[sweep % len(candidates)]
            radii = np.sort(rng.uniform(0.3, 9, 6))
            counts = [zero_count(f, float(r)) for r in radii]
            assert counts == sorted(counts)


class TestCounting:
    def test_no_zeros(self):
        assert counting(exp_term(1, PI_I), 20) == 0

    def test_cosine(self, two_cos):
        assert counting(two_cos, 50) / 50 == pytest.approx(2.0, abs=0.1)

    def test_many_zeros_solution(self, f4):
        assert 1.9 <= counting(f4, 50) / 50 <= 2.1

    def test_zero_at_origin_is_shifted(self):
        """f(0) = 0 moves the argument and reports the offset."""
        sine = exp_term(1, PI_I) - exp_term(1, -PI_I)  # 2i·sin(πz)
        result = counting_function(sine, 5)
        assert result.offset == pytest.approx(0.1237)
        assert result.value > 0
        assert result.to_dict()["offset"] == "(0.1237)"

    def test_counts_nondecreasing(self, f4):
        result = counting_function(f4, 10, grid=16)
        assert result.counts == sorted(result.counts)
        assert len(result.radii) == 16

    def test_rejects_bad_arguments(self, f4):
        """Negative radii and a one-point grid are parameter errors."""
        with pytest.raises(ParameterError):
            counting(f4, -1)
        with pytest.raises(ParameterError):
            counting(f4, 10, grid=1)

    @pytest.mark.slow
    def test_binomial_solutions_count_their_growth(self):
        """N(r, 1/f) tracks T(r, f) for the binomial solutions."""
        params = get_fixture("example1").params()
        for case in classify(params).solutions:
            t = characteristic(case.solution, 50)
            n = counting(case.solution, 50)
            assert abs(t - n) <= 0.1 * t


class TestOrderEstimates:
    @pytest.mark.slow
    def test_cosine_has_order_one(self, two_cos):
        """Exponential growth fits order 1 and hyper-order 0."""
        order, hyper = order_estimates(two_cos, np.geomspace(10, 1000, 12))
        assert order == pytest.approx(1.0, abs=0.05)
        assert hyper == pytest.approx(0.0, abs=0.05)

    def test_polynomial_has_order_zero(self):
        """Logarithmic growth fits order 0."""
        cube = ExpSum.from_poly(PolyC((0, 0, 0, 1)))
        order, _ = order_estimates(cube, np.geomspace(10, 1e8, 12))
        assert order == pytest.approx(0.0, abs=0.1)

    def test_constant(self):
        """Constants give exactly zero order and hyper-order."""
        assert order_estimates(ExpSum.constant(3), np.geomspace(1, 1000, 8)) == (0.0, 0.0)

    def test_flat_characteristic_fits_zero(self):
        """Rounding noise in a flat T(r) is not reported as growth."""
        assert _fit_orders(np.geomspace(1, 1000, 8), np.full(8, 2.0)) == (0.0, 0.0)

    @pytest.mark.parametrize(
        "radii",
        [
            [1, 10, 100, 1000, 1e4],
            [1, 2, 3, 4, 5, 6, 7, 8],
            [1, 10, 5, 100, 200, 300, 400, 1000],
        ],
    )
    def test_rejects_bad_sweeps(self, radii):
        with pytest.raises(ParameterError):
            order_estimates(ExpSum.constant(3), radii)


class TestCharacteristicProfile:
    @pytest.mark.slow
    def test_many_zeros_profile(self, f4):
        """Profile columns are consistent and N(r)/r approaches 2."""
        profile = characteristic_profile(f4, 1, 50, points=8, grid=32)
        rows = profile.rows()
        assert len(rows) == 8
        assert list(rows[0]) == ["r", "m", "n", "N", "T"]
        assert profile.T_vals == profile.m_vals
        assert profile.n_counts == sorted(profile.n_counts)
        assert profile.N_vals == sorted(profile.N_vals)
        assert all(v >= 0 for v in profile.m_vals + profile.N_vals)
        assert profile.N_vals[-1] / 50 == pytest.approx(2.0, abs=0.1)

    def test_short_sweep_warns(self):
        """Too short a range flags the order fit."""
        profile = characteristic_profile(exp_term(1, PI_I), 1, 5, points=4, grid=8)
        assert any("order estimate unreliable" in w for w in profile.warnings)
        assert profile.summary()["offset"] == "(0)"

    def test_rejects_bad_range(self, f4):
        with pytest.raises(ParameterError):
            characteristic_profile(f4, 5, 1)
        with pytest.raises(ParameterError):
            characteristic_profile(f4, 1, 5, points=1)


class TestZeroLocation:
    def test_cosine_zeros(self, two_cos):
        zeros = locate_zeros(two_cos, 2)
        centers = [z.center for z in zeros]
        assert centers == pytest.approx([-1.5, -0.5, 0.5, 1.5], abs=1e-9)

    def test_many_zeros_solution_positions(self, f4):
        """Zeros at 2k + hi and 2k + 1 - hi."""
        zeros = locate_zeros(f4, 3)
        expected = [
            -2 + F4_ZERO_HEIGHT * 1j,
            -1 - F4_ZERO_HEIGHT * 1j,
            F4_ZERO_HEIGHT * 1j,
            1 - F4_ZERO_HEIGHT * 1j,
            2 + F4_ZERO_HEIGHT * 1j,
        ]
        assert [z.center for z in zeros] == pytest.approx(expected, abs=1e-8)

    def test_all_simple(self, f4):
        report = simple_zero_report(f4, 3)
        assert report.all_simple
        assert report.to_dict()["zero_count"] == 5

    def test_double_zero_detected(self):
        """The winding circle measures multiplicity 2."""
        square = (exp_term(1, PI_I) - 1) * (exp_term(1, PI_I) - 1)  # double zeros at 2k
        report = simple_zero_report(square, 1.5)
        assert not report.all_simple
        assert [z.multiplicity for z in report.multiple] == [2]
        assert report.multiple[0].center == pytest.approx(0, abs=1e-5)

    def test_capped_refinement_keeps_double_zero(self):
        """A small node cap ends refinement early and reports the double zero as a cluster."""
        square = (exp_term(1, PI_I) - 1) * (exp_term(1, PI_I) - 1)
        zeros = locate_zeros(square, 1.5, max_nodes=4096)
        assert [z.multiplicity for z in zeros] == [2]
        assert abs(zeros[0].center) <= zeros[0].size

    def test_capped_report_measures_multiplicity(self):
        """The capped cluster still reports multiplicity 2."""
        square = (exp_term(1, PI_I) - 1) * (exp_term(1, PI_I) - 1)
        report = simple_zero_report(square, 1.5, max_nodes=4096)
        assert [z.multiplicity for z in report.zeros] == [2]

    def test_zero_function_undefined(self):
        with pytest.raises(UndefinedError):
            locate_zeros(ExpSum.zero(), 1)
