"""Enumerate and certify the exact solutions of fⁿ + qΔf = p₁e^{α₁z} + p₂e^{α₂z}.

Two families exist for solutions of hyper-order below 1:

* monomial  f = c·e^{(α₁/n)z}  when α₁ = nα₂ and c(e^{α₁/n} − 1)q = p₂
  (or the mirror image with the roles of the indices swapped), for n ≥ 2;
* binomial  f = e₁e^{(α₁/3)z} + e₂e^{(α₂/3)z}  when n = 3, α₁ + α₂ = 0,
  e^{α₁/3} = −1 and 3e₁e₂ = 2q.

Candidate constants are the finitely many roots of the constraint systems;
each is filtered by its constraints and then certified by substitution, so
every reported solution is sound regardless of floating-point gating.
"""

from __future__ import annotations

import cmath
import logging
import math
from collections.abc import Iterator

from src.equation import DEFAULT_VERIFY_TOL, EquationParams, verify
from src.expsum import ExpSum, equivalent
from src.models import Candidates, Classification, SolutionCase
from src.parser import render

logger = logging.getLogger(__name__)

DEFAULT_TOL_REL = 1e-8
NEAR_MISS_FACTOR = 1e3

BINOMIAL_LABEL = "Binomial-T1.1-(1)"
MONOMIAL_1_LABEL = "Monomial-α1=nα2"
MONOMIAL_2_LABEL = "Monomial-α2=nα1"

NOTE_Q_NONCONSTANT = (
    "q must be constant: a nonconstant q admits no solution of hyper-order < 1, extending "
    "the finite-order results of Liu, Lü et al. (n>=4) and Zhang et al. (n=3)"
)


def nth_roots(p: complex, n: int) -> list[complex]:
    """All n complex n-th roots of p, ordered by argument in (−π, π]."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    p = complex(p)
    if p == 0:
        return [0j] * n
    modulus = abs(p) ** (1.0 / n)
    theta = cmath.phase(p)
    roots = [cmath.rect(modulus, (theta + 2 * math.pi * k) / n) for k in range(n)]
    return sorted(roots, key=cmath.phase)


def relative_gap(a: complex, b: complex) -> float:
    """|a − b| / max(|a|, |b|), or 0 when both vanish."""
    denom = max(abs(a), abs(b))
    return abs(a - b) / denom if denom else 0.0


def _gate(name: str, value: float, bound: float, notes: list[str]) -> bool:
    """Accept when value ≤ bound; record a note for near misses."""
    if value <= bound:
        logger.debug("gate %s passed: %.3e <= %.3e", name, value, bound)
        return True
    if value <= NEAR_MISS_FACTOR * bound:
        notes.append(
            f"near miss: {name} holds only to {value:.3e} "
            f"(gate tolerance {bound:.3e}); no candidates emitted for it"
        )
    logger.debug("gate %s failed: %.3e > %.3e", name, value, bound)
    return False


def _certify(
    params: EquationParams,
    case: SolutionCase,
    verify_tol: float,
    notes: list[str],
) -> SolutionCase | None:
    report = verify(params, case.solution, verify_tol)
    if not report.is_solution:
        logger.debug(
            "candidate %s rejected by substitution (residual %.3e)",
            render(case.solution),
            report.residual_max,
        )
        notes.append(
            f"candidate {render(case.solution)} passed its constraints but failed "
            f"substitution (residual {report.residual_max:.3e})"
        )
        return None
    case.verification = report
    return case


# ----------------------------------------------------------------------
# Monomial family
# ----------------------------------------------------------------------


def _monomial_side(
    params: EquationParams,
    *,
    label: str,
    const_name: str,
    alpha_big: complex,
    alpha_small: complex,
    p_root: complex,
    p_other: complex,
    tol_rel: float,
    verify_tol: float,
    notes: list[str],
) -> Iterator[SolutionCase]:
    n = params.n
    q = params.q_constant
    gate_name = label.removeprefix("Monomial-")
    scale = max(1.0, abs(alpha_big), abs(n * alpha_small))
    gate_value = abs(alpha_big - n * alpha_small) / scale
    if not _gate(gate_name, gate_value, tol_rel, notes):
        return
    freq = alpha_big / n
    step = cmath.exp(freq) - 1
    for c in nth_roots(p_root, n):
        root_gap = relative_gap(c**n, p_root)
        link_gap = relative_gap(c * step * q, p_other)
        if link_gap > tol_rel:
            logger.debug("%s: root %s discarded (violation %.3e)", label, c, link_gap)
            continue
        case = SolutionCase(
            case_label=label,
            solution=ExpSum.exponential(c, freq, tol=params.tol),
            constants={const_name: c},
            constraints_checked=[
                (gate_name, gate_value),
                (f"{const_name}^n=p", root_gap),
                (f"{const_name}(exp(alpha/n)-1)q=p", link_gap),
            ],
        )
        certified = _certify(params, case, verify_tol, notes)
        if certified is not None:
            yield certified


def monomial_candidates(
    params: EquationParams,
    tol_rel: float = DEFAULT_TOL_REL,
    verify_tol: float = DEFAULT_VERIFY_TOL,
) -> Candidates:
    """Certified monomials c·e^{(α₁/n)z} when α₁ = nα₂, or c·e^{(α₂/n)z} when α₂ = nα₁.

    Every n-th root of the relevant p is tried against the linking constraint
    and survivors are certified by substitution.
    """
    result = Candidates()
    if not params.q_is_constant:
        result.notes.append(NOTE_Q_NONCONSTANT)
        return result
    result.cases.extend(
        _monomial_side(
            params,
            label=MONOMIAL_1_LABEL,
            const_name="c1",
            alpha_big=params.alpha1,
            alpha_small=params.alpha2,
            p_root=params.p1,
            p_other=params.p2,
            tol_rel=tol_rel,
            verify_tol=verify_tol,
            notes=result.notes,
        )
    )
    result.cases.extend(
        _monomial_side(
            params,
            label=MONOMIAL_2_LABEL,
            const_name="c2",
            alpha_big=params.alpha2,
            alpha_small=params.alpha1,
            p_root=params.p2,
            p_other=params.p1,
            tol_rel=tol_rel,
            verify_tol=verify_tol,
            notes=result.notes,
        )
    )
    return result


# ----------------------------------------------------------------------
# Binomial family
# ----------------------------------------------------------------------


def _binomial_pairs(
    params: EquationParams, tol_rel: float
) -> Iterator[tuple[str, complex, complex]]:
    for e1 in nth_roots(params.p1, 3):
        for e2 in nth_roots(params.p2, 3):
            yield "direct", e1, e2
    if relative_gap(params.p1, params.p2) > tol_rel:
        # e₁³ = p₂, e₂³ = p₁ with e₁ still attached to α₁/3
        for e1 in nth_roots(params.p2, 3):
            for e2 in nth_roots(params.p1, 3):
                yield "swapped", e1, e2


def binomial_candidates(
    params: EquationParams,
    tol_rel: float = DEFAULT_TOL_REL,
    verify_tol: float = DEFAULT_VERIFY_TOL,
) -> Candidates:
    """Certified solutions e₁e^{(α₁/3)z} + e₂e^{(α₂/3)z}; only n = 3 has them."""
    result = Candidates()
    if params.n != 3:
        result.notes.append(f"binomial solutions exist only for n=3 (n={params.n})")
        return result
    if not params.q_is_constant:
        result.notes.append(NOTE_Q_NONCONSTANT)
        return result
    a1, a2, q = params.alpha1, params.alpha2, params.q_constant
    sum_gap = abs(a1 + a2) / max(1.0, abs(a1), abs(a2))
    if not _gate("alpha1+alpha2=0", sum_gap, tol_rel, result.notes):
        return result
    exp_gap = abs(cmath.exp(a1 / 3) + 1) / max(1.0, abs(a1))
    if not _gate("exp(alpha1/3)=-1", exp_gap, tol_rel, result.notes):
        return result

    accepted: list[SolutionCase] = []
    for assignment, e1, e2 in _binomial_pairs(params, tol_rel):
        product_gap = relative_gap(3 * e1 * e2, 2 * q)
        if product_gap > tol_rel:
            continue
        p_e1, p_e2 = (params.p1, params.p2) if assignment == "direct" else (params.p2, params.p1)
        f = ExpSum.exponential(e1, a1 / 3, tol=params.tol) + ExpSum.exponential(
            e2, a2 / 3, tol=params.tol
        )
        if any(equivalent(f, prior.solution, verify_tol) for prior in accepted):
            logger.debug("binomial (%s, %s) duplicates an accepted solution", e1, e2)
            continue
        case = SolutionCase(
            case_label=BINOMIAL_LABEL,
            solution=f,
            constants={"e1": e1, "e2": e2},
            constraints_checked=[
                ("alpha1+alpha2=0", sum_gap),
                ("exp(alpha1/3)=-1", exp_gap),
                ("e1^3=p", relative_gap(e1**3, p_e1)),
                ("e2^3=p", relative_gap(e2**3, p_e2)),
                ("3e1e2=2q", product_gap),
            ],
        )
        certified = _certify(params, case, verify_tol, result.notes)
        if certified is not None:
            accepted.append(certified)
    result.cases.extend(accepted)
    return result


# ----------------------------------------------------------------------
# Classification
# ----------------------------------------------------------------------


def _family_notes(params: EquationParams) -> list[str]:
    n = params.n
    if n == 2:
        return [
            "n=2: the monomial forms exhaust the entire solutions of hyper-order < 1 "
            "only among those with N(r,1/f)=S(r,f); solutions with N(r,1/f)≠S(r,f) "
            "are not enumerated",
        ]
    if n == 3:
        notes = [
            "n=3: the binomial and monomial forms exhaust the entire solutions "
            "of hyper-order < 1",
        ]
        if abs(params.alpha1 + params.alpha2) > DEFAULT_TOL_REL * max(
            1.0, abs(params.alpha1), abs(params.alpha2)
        ):
            notes.append(
                "alpha1+alpha2≠0 forces 0 to be a Picard exceptional value of f "
                "(Latreuch, 2017, settling the conjecture of Zhang et al.), "
                "so only monomial forms can occur"
            )
        return notes
    return [f"n={n}: the monomial forms exhaust the entire solutions of hyper-order < 1"]


def classify(
    params: EquationParams,
    tol_rel: float = DEFAULT_TOL_REL,
    verify_tol: float = DEFAULT_VERIFY_TOL,
) -> Classification:
    """Every certified solution for params, sorted by (label, constants).

    Raises:
        ParameterError: only through EquationParams construction; params
            reaching this function are already valid.
    """
    if not params.q_is_constant:
        logger.info("q has degree %d; no solutions", params.q.degree)
        return Classification(params, False, [], [NOTE_Q_NONCONSTANT])

    notes = _family_notes(params)
    monomials = monomial_candidates(params, tol_rel, verify_tol)
    solutions = list(monomials)
    notes.extend(monomials.notes)
    if params.n == 3:
        binomials = binomial_candidates(params, tol_rel, verify_tol)
        solutions.extend(binomials)
        notes.extend(binomials.notes)
        if len(binomials):
            notes.append(
                "binomial solutions satisfy T(r,f)=N1(r,1/f)+S(r,f) with N1 counting "
                "simple zeros; check with the char command"
            )
    solutions.sort(key=SolutionCase.sort_key)
    logger.info("classified n=%d: %d solution(s)", params.n, len(solutions))
    return Classification(params, True, solutions, notes)
