"""The equation family  fⁿ + q(z)·Δf = p₁e^{α₁z} + p₂e^{α₂z}.

EquationParams holds one instance, residual() substitutes a candidate
symbolically and verify() turns the residual into a certified verdict.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from numbers import Number
from typing import Any

from src.errors import ParameterError
from src.expsum import (
    DEFAULT_TOLERANCES,
    ExpSum,
    PolyC,
    Tolerances,
    delta,
    evaluate,
    max_coeff_magnitude,
    power,
)
from src.models import VerificationReport
from src.parser import parse_complex, parse_poly, render, render_complex

logger = logging.getLogger(__name__)

DEFAULT_VERIFY_TOL = 1e-9

INSTANCE_FIELDS = ("n", "q", "p1", "p2", "alpha1", "alpha2")


def _finite(c: complex) -> bool:
    return math.isfinite(c.real) and math.isfinite(c.imag)


@dataclass(frozen=True)
class EquationParams:
    """One instance (n, q, p₁, p₂, α₁, α₂).

    Validated on construction; every violation is reported in a single
    ParameterError.
    """

    n: int
    q: PolyC
    p1: complex
    p2: complex
    alpha1: complex
    alpha2: complex
    tol: Tolerances = field(default=DEFAULT_TOLERANCES, compare=False)

    def __post_init__(self):
        violations: list[str] = []
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 2:
            violations.append(f"n must be an integer >= 2, got {self.n!r}")
        if not isinstance(self.q, PolyC):
            object.__setattr__(self, "q", PolyC.constant(self.q))
        if self.q.is_zero:
            violations.append("q must not be the zero polynomial")
        for name in ("p1", "p2", "alpha1", "alpha2"):
            value = complex(getattr(self, name))
            object.__setattr__(self, name, value)
            if not _finite(value):
                violations.append(f"{name} must be finite")
            elif value == 0:
                violations.append(f"{name} must be nonzero")
        if _finite(self.alpha1) and _finite(self.alpha2) and self.tol.freq_close(
            self.alpha1, self.alpha2
        ):
            violations.append("alpha1 and alpha2 must be distinct")
        if violations:
            raise ParameterError(violations)

    @property
    def q_is_constant(self) -> bool:
        return self.q.is_constant

    @property
    def q_constant(self) -> complex | None:
        return self.q.coeffs[0] if self.q.is_constant else None

    @classmethod
    def from_dict(
        cls, data: dict[str, Any], tol: Tolerances = DEFAULT_TOLERANCES
    ) -> EquationParams:
        """Build from the JSON instance schema; scalar fields are expression strings.

        Raises:
            ParameterError: missing fields or invalid values.
            ParseError: an expression does not parse.
        """
        missing = [k for k in INSTANCE_FIELDS if k not in data]
        if missing:
            raise ParameterError([f"missing field {k!r}" for k in missing])
        n = data["n"]
        if isinstance(n, float) and n.is_integer():
            n = int(n)
        return cls(
            n=n,
            q=_poly_field(data["q"], tol),
            p1=_scalar_field(data["p1"]),
            p2=_scalar_field(data["p2"]),
            alpha1=_scalar_field(data["alpha1"]),
            alpha2=_scalar_field(data["alpha2"]),
            tol=tol,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "q": render(ExpSum.from_poly(self.q, self.tol)),
            "p1": render_complex(self.p1),
            "p2": render_complex(self.p2),
            "alpha1": render_complex(self.alpha1),
            "alpha2": render_complex(self.alpha2),
        }


def _scalar_field(value: Any) -> complex:
    if isinstance(value, str):
        return parse_complex(value)
    if isinstance(value, Number) and not isinstance(value, bool):
        return complex(value)
    raise ParameterError([f"expected an expression string or number, got {value!r}"])


def _poly_field(value: Any, tol: Tolerances) -> PolyC:
    if isinstance(value, str):
        return parse_poly(value, tol)
    return PolyC.constant(_scalar_field(value))


# ----------------------------------------------------------------------
# Substitution
# ----------------------------------------------------------------------


def rhs(params: EquationParams) -> ExpSum:
    """p₁e^{α₁z} + p₂e^{α₂z}."""
    return ExpSum.exponential(params.p1, params.alpha1, tol=params.tol) + ExpSum.exponential(
        params.p2, params.alpha2, tol=params.tol
    )


def lhs(params: EquationParams, f: ExpSum) -> ExpSum:
    """fⁿ + q·Δf."""
    return power(f, params.n) + delta(f) * params.q


def residual(params: EquationParams, f: ExpSum) -> ExpSum:
    """fⁿ + q·Δf − p₁e^{α₁z} − p₂e^{α₂z}, canonical."""
    return lhs(params, f) - rhs(params)


def pointwise_residual(params: EquationParams, f: ExpSum, z: Number) -> complex:
    """The residual evaluated by substituting numbers rather than symbols."""
    z = complex(z)
    fz = evaluate(f, z)
    left = fz**params.n + params.q(z) * (evaluate(f, z + 1) - fz)
    right = params.p1 * cmath.exp(params.alpha1 * z) + params.p2 * cmath.exp(params.alpha2 * z)
    return left - right


def verify(
    params: EquationParams, f: ExpSum, tol: float = DEFAULT_VERIFY_TOL
) -> VerificationReport:
    """Certify f by symbolic substitution.

    The residual's largest coefficient is compared against tol times the
    largest of |p₁|, |p₂| and the coefficients of fⁿ.
    """
    f_power = power(f, params.n)
    res = f_power + delta(f) * params.q - rhs(params)
    scale = max(abs(params.p1), abs(params.p2), max_coeff_magnitude(f_power))
    residual_max = max_coeff_magnitude(res)
    is_solution = residual_max <= tol * scale
    logger.debug(
        "verify n=%d: residual_max=%.3e scale=%.3e -> %s",
        params.n,
        residual_max,
        scale,
        is_solution,
    )
    return VerificationReport(
        is_solution=is_solution,
        residual_max=residual_max,
        residual=res,
        tolerance=tol,
        scale=scale,
    )
