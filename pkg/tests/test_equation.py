"""Tests for EquationParams, residual and verify in src/equation.py."""

import math

import pytest

from src.equation import (
    EquationParams,
    lhs,
    pointwise_residual,
    residual,
    rhs,
    verify,
)
from src.errors import ParameterError, ParseError
from src.expsum import ExpSum, PolyC, evaluate, is_zero
from src.parser import parse_expsum, render

PI_I = math.pi * 1j


@pytest.fixture
def example1(example1_instance):
    return EquationParams.from_dict(example1_instance)


class TestEquationParams:
    """Validation and the JSON instance schema."""

    def test_from_dict(self, example1):
        assert example1.n == 3
        assert example1.q_constant == 1.5
        assert example1.alpha1 == pytest.approx(3 * PI_I)

    def test_numbers_accepted_as_well_as_strings(self):
        """JSON numbers are accepted wherever an expression string is."""
        params = EquationParams.from_dict(
            {"n": 2.0, "q": -2, "p1": 2, "p2": 2, "alpha1": "2*pi*i", "alpha2": "-2*pi*i"}
        )
        assert params.n == 2
        assert params.q == PolyC.constant(-2)

    def test_polynomial_q(self):
        params = EquationParams.from_dict(
            {"n": 3, "q": "1 + z", "p1": "1", "p2": "1", "alpha1": "1", "alpha2": "2"}
        )
        assert not params.q_is_constant
        assert params.q_constant is None

    def test_all_violations_reported_together(self):
        """Every invalid field is listed, not just the first."""
        with pytest.raises(ParameterError) as exc:
            EquationParams(n=1, q=PolyC(), p1=0, p2=1, alpha1=1, alpha2=1)
        violations = exc.value.violations
        assert len(violations) == 4
        assert any("n must be" in v for v in violations)
        assert any("zero polynomial" in v for v in violations)
        assert any("p1 must be nonzero" in v for v in violations)
        assert any("distinct" in v for v in violations)

    def test_nearly_equal_frequencies_rejected(self):
        """Frequencies within tol_freq count as equal."""
        with pytest.raises(ParameterError, match="distinct"):
            EquationParams(n=2, q=PolyC.constant(1), p1=1, p2=1, alpha1=1, alpha2=1 + 1e-12)

    def test_missing_fields(self):
        """Each absent key is its own violation."""
        with pytest.raises(ParameterError) as exc:
            EquationParams.from_dict({"n": 3})
        assert len(exc.value.violations) == 5

    def test_bad_expression_is_parse_error(self):
        with pytest.raises(ParseError):
            EquationParams.from_dict(
                {"n": 3, "q": "1", "p1": "1 +", "p2": "1", "alpha1": "1", "alpha2": "2"}
            )

    def test_to_dict_reparses(self, example1):
        """to_dict output loads back to equal params."""
        again = EquationParams.from_dict(example1.to_dict())
        assert again == example1


class TestResidual:
    def test_example1_solution_has_zero_residual(self, example1, two_cos):
        assert is_zero(residual(example1, two_cos), 1e-12)

    def test_example4_solution_has_zero_residual(self, f4):
        params = EquationParams(
            n=2, q=PolyC.constant(-2), p1=2, p2=2, alpha1=2 * PI_I, alpha2=-2 * PI_I
        )
        assert is_zero(residual(params, f4), 1e-12)

    def test_missing_frequencies_leave_residual(self, example1):
        """Dropping one exponential leaves a nonzero residual."""
        res = residual(example1, ExpSum.exponential(1, PI_I))
        assert not is_zero(res)

    def test_symbolic_matches_pointwise(self, example1, rng):
        """The symbolic residual agrees with direct evaluation of the equation."""
        f = ExpSum.exponential(1, PI_I)
        res = residual(example1, f)
        for z in rng.uniform(-1, 1, 20) + 1j * rng.uniform(-1, 1, 20):
            symbolic = evaluate(res, z)
            direct = pointwise_residual(example1, f, z)
            assert abs(symbolic - direct) <= 1e-8 * max(1.0, abs(direct))

    def test_lhs_minus_rhs(self, example1, two_cos):
        assert is_zero(lhs(example1, two_cos) - rhs(example1), 1e-12)


class TestVerify:
    def test_bundled_solutions_certified(self, bundled):
        report = verify(bundled.params(), bundled.solution_expsum())
        assert report.is_solution
        assert report.residual_max <= 1e-9 * report.scale

    def test_zero_candidate_rejected(self, example1):
        """f = 0 leaves the whole right-hand side as residual."""
        report = verify(example1, ExpSum.zero())
        assert not report.is_solution
        assert report.residual_max == pytest.approx(1.0)

    def test_verdict_stable_under_round_trip(self, bundled):
        """Rendering and re-parsing a solution keeps it certified."""
        f = parse_expsum(render(bundled.solution_expsum()))
        assert verify(bundled.params(), f).is_solution

    def test_tolerance_matters(self, example1):
        """A perturbed solution passes only under a loose tolerance."""
        near = parse_expsum("exp(pi*i*z) + 1.000001*exp(-pi*i*z)")
        assert not verify(example1, near).is_solution
        assert verify(example1, near, tol=1e-3).is_solution

    def test_report_serializes(self, example1, two_cos):
        d = verify(example1, two_cos).to_dict()
        assert d["is_solution"] is True
        assert d["residual"] == "0"
