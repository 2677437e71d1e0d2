"""Tests for the solution classifier in src/classifier.py."""

import cmath
import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.classifier import (
    BINOMIAL_LABEL,
    MONOMIAL_1_LABEL,
    MONOMIAL_2_LABEL,
    NOTE_Q_NONCONSTANT,
    binomial_candidates,
    classify,
    monomial_candidates,
    nth_roots,
    relative_gap,
)
from src.equation import EquationParams, verify
from src.expsum import ExpSum, PolyC, equivalent
from src.fixtures import get_fixture
from src.parser import parse_expsum

PI_I = math.pi * 1j
OMEGA = cmath.exp(2j * math.pi / 3)


def same_solutions(found, expected) -> bool:
    """Set equality of ExpSums up to equivalence."""
    if len(found) != len(expected):
        return False
    return all(any(equivalent(f, e, 1e-9) for e in expected) for f in found)


def monomial_params(n, c1, alpha1, q) -> EquationParams:
    """Params for which c1·e^{(α1/n)z} is a solution with α1 = nα2."""
    alpha2 = alpha1 / n
    p2 = c1 * (cmath.exp(alpha1 / n) - 1) * q
    return EquationParams(
        n=n, q=PolyC.constant(q), p1=c1**n, p2=p2, alpha1=alpha1, alpha2=alpha2
    )


class TestNthRoots:
    def test_cube_roots_of_unity(self):
        roots = nth_roots(1, 3)
        assert len(roots) == 3
        for r in roots:
            assert r**3 == pytest.approx(1)
        assert sorted(cmath.phase(r) for r in roots) == pytest.approx(
            [-2 * math.pi / 3, 0, 2 * math.pi / 3]
        )

    def test_roots_of_complex_number(self):
        """Every fifth root of 2-3i raises back to it."""
        for r in nth_roots(2 - 3j, 5):
            assert r**5 == pytest.approx(2 - 3j)

    def test_rejects_nonpositive_n(self):
        with pytest.raises(ValueError):
            nth_roots(1, 0)

    def test_relative_gap(self):
        """Zero-over-zero counts as no gap."""
        assert relative_gap(0, 0) == 0
        assert relative_gap(1, 1.5) == pytest.approx(1 / 3)


class TestBundledInstances:
    """Classification of the four bundled instances."""

    def test_example1_three_binomials(self):
        """The three pairs (1,1), (ω,ω²) and (ω²,ω)."""
        result = classify(get_fixture("example1").params())
        assert result.q_is_constant
        assert result.labels() == [BINOMIAL_LABEL] * 3
        pairs = [(c.constants["e1"], c.constants["e2"]) for c in result.solutions]
        expected = {(1, 1), (OMEGA, OMEGA**2), (OMEGA**2, OMEGA)}
        for e1, e2 in expected:
            assert any(abs(a - e1) < 1e-9 and abs(b - e2) < 1e-9 for a, b in pairs)

    def test_example1_solutions_are_certified(self):
        """Every binomial candidate carries a passing verification."""
        params = get_fixture("example1").params()
        for case in classify(params).solutions:
            assert case.verification is not None
            assert verify(params, case.solution).is_solution

    def test_example2_single_monomial(self):
        result = classify(get_fixture("example2").params())
        assert result.labels() == [MONOMIAL_1_LABEL]
        case = result.solutions[0]
        assert case.constants["c1"] == pytest.approx(1)
        assert equivalent(case.solution, ExpSum.exponential(1, PI_I), 1e-9)
        assert case.max_violation <= 1e-9

    def test_example3_single_monomial(self):
        result = classify(get_fixture("example3").params())
        assert result.labels() == [MONOMIAL_2_LABEL]
        case = result.solutions[0]
        assert case.constants["c2"] == pytest.approx(1)
        assert equivalent(case.solution, ExpSum.exponential(1, 3 * PI_I), 1e-9)

    def test_example4_has_no_enumerated_solution(self):
        """The many-zeros solution is outside the enumerated forms, so only a note."""
        result = classify(get_fixture("example4").params())
        assert result.solutions == []
        assert any("N(r,1/f)" in note for note in result.notes)

    def test_n2_desk_instance(self):
        """n=2 monomial checked by hand."""
        params = EquationParams(
            n=2, q=PolyC.constant(-0.5), p1=1, p2=1, alpha1=2 * PI_I, alpha2=PI_I
        )
        result = classify(params)
        assert result.labels() == [MONOMIAL_1_LABEL]
        assert result.solutions[0].constants["c1"] == pytest.approx(1)
        assert verify(params, result.solutions[0].solution).is_solution


class TestNegativeControls:
    def test_nonconstant_q(self):
        """A polynomial q stops classification with a single note."""
        params = EquationParams(
            n=3, q=PolyC((1, 1)), p1=1, p2=1, alpha1=3 * PI_I, alpha2=-3 * PI_I
        )
        result = classify(params)
        assert not result.q_is_constant
        assert result.solutions == []
        assert result.notes == [NOTE_Q_NONCONSTANT]
        assert "Zhang et al." in NOTE_Q_NONCONSTANT

    def test_nonconstant_q_in_each_family(self):
        params = EquationParams(
            n=3, q=PolyC((1, 1)), p1=1, p2=1, alpha1=3 * PI_I, alpha2=-3 * PI_I
        )
        assert monomial_candidates(params).notes == [NOTE_Q_NONCONSTANT]
        assert binomial_candidates(params).notes == [NOTE_Q_NONCONSTANT]

    def test_binomial_needs_cube(self):
        """Binomial forms are only enumerated for n=3."""
        params = get_fixture("example4").params()
        result = binomial_candidates(params)
        assert len(result) == 0
        assert "n=3" in result.notes[0]

    def test_unrelated_frequencies(self):
        """α1+α2≠0 with no nα link leaves no candidates."""
        params = EquationParams(n=3, q=PolyC.constant(1), p1=1, p2=1, alpha1=1, alpha2=2j)
        result = classify(params)
        assert result.solutions == []
        assert any("Picard" in note for note in result.notes)
        assert any("Latreuch" in note for note in result.notes)

    def test_near_miss_is_noted(self):
        """A frequency link just outside tolerance is reported."""
        params = EquationParams(
            n=3, q=PolyC.constant(-0.5), p1=1, p2=1, alpha1=3 * PI_I, alpha2=PI_I * (1 + 1e-7)
        )
        result = monomial_candidates(params)
        assert len(result) == 0
        assert any("near miss" in note for note in result.notes)

    def test_wrong_link_constant(self):
        """Matching frequencies but a wrong p2 gives nothing."""
        params = EquationParams(
            n=3, q=PolyC.constant(-0.5), p1=1, p2=2, alpha1=3 * PI_I, alpha2=PI_I
        )
        assert classify(params).solutions == []


class TestOracles:
    """Brute force over every root agrees with the candidate generators."""

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_monomial_completeness(self, n, rng):
        """Candidates equal every n-th root that verifies."""
        for _ in range(5):
            c1 = complex(*rng.uniform(-2, 2, 2))
            alpha1 = complex(*rng.uniform(-3, 3, 2))
            q = complex(*rng.uniform(-2, 2, 2))
            params = monomial_params(n, c1, alpha1, q)
            brute = [
                ExpSum.exponential(c, alpha1 / n)
                for c in nth_roots(params.p1, n)
                if verify(params, ExpSum.exponential(c, alpha1 / n)).is_solution
            ]
            found = [case.solution for case in monomial_candidates(params)]
            assert same_solutions(found, brute)
            assert any(equivalent(f, ExpSum.exponential(c1, alpha1 / n), 1e-9) for f in found)

    @pytest.mark.parametrize(("p1", "p2", "q"), [(1, 1, 1.5), (8, 1, 3), (1j, -1, 1.5)])
    def test_binomial_completeness(self, p1, p2, q):
        params = EquationParams(
            n=3, q=PolyC.constant(q), p1=p1, p2=p2, alpha1=3 * PI_I, alpha2=-3 * PI_I
        )
        roots1, roots2 = nth_roots(p1, 3), nth_roots(p2, 3)
        pairs = list(itertools.product(roots1, roots2)) + list(
            itertools.product(nth_roots(p2, 3), nth_roots(p1, 3))
        )
        brute: list[ExpSum] = []
        for e1, e2 in pairs:
            f = ExpSum.exponential(e1, PI_I) + ExpSum.exponential(e2, -PI_I)
            if verify(params, f).is_solution and not any(
                equivalent(f, b, 1e-9) for b in brute
            ):
                brute.append(f)
        found = [case.solution for case in binomial_candidates(params)]
        assert same_solutions(found, brute)

    def test_monomial_scale_invariance(self):
        """Large coefficients classify the same as unit ones."""
        base = monomial_params(3, 1.0, 3 * PI_I, -0.5)
        scaled = EquationParams(
            n=3,
            q=PolyC.constant(-0.5 * 1e6),
            p1=base.p1 * 1e18,
            p2=base.p2 * 1e12,
            alpha1=base.alpha1,
            alpha2=base.alpha2,
        )
        result = classify(scaled)
        assert len(result.solutions) == 1
        assert result.solutions[0].constants["c1"] == pytest.approx(1e6)

    @given(
        st.floats(min_value=0.5, max_value=2.0),
        st.floats(min_value=0.0, max_value=2 * math.pi, exclude_max=True),
    )
    @settings(max_examples=30, deadline=None)
    def test_binomial_scale_invariance(self, modulus, angle):
        """f ↦ s·f maps q to q·sⁿ⁻¹ and both p to p·sⁿ."""
        s = cmath.rect(modulus, angle)
        base = get_fixture("example1").params()
        scaled = EquationParams(
            n=base.n,
            q=base.q * s ** (base.n - 1),
            p1=base.p1 * s**base.n,
            p2=base.p2 * s**base.n,
            alpha1=base.alpha1,
            alpha2=base.alpha2,
        )
        expected = [case.solution * s for case in classify(base).solutions]
        result = classify(scaled)
        assert result.labels() == [BINOMIAL_LABEL] * 3
        assert same_solutions([case.solution for case in result.solutions], expected)


class TestSerialization:
    def test_classification_to_dict(self):
        d = classify(get_fixture("example2").params()).to_dict()
        assert d["q_is_constant"] is True
        assert d["solutions"][0]["case"] == MONOMIAL_1_LABEL
        assert equivalent(parse_expsum(d["solutions"][0]["f"]), ExpSum.exponential(1, PI_I), 1e-9)
        assert "c1^n=p" in d["solutions"][0]["constraints"]

    def test_sorted_output(self):
        """Solutions come out in sort_key order."""
        result = classify(get_fixture("example1").params())
        keys = [case.sort_key() for case in result.solutions]
        assert keys == sorted(keys)
