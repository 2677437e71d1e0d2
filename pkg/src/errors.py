"""Exception hierarchy for the solver.

Every error carries a stable ``code`` and serializes through to_dict() so the
CLI can emit structured diagnostics on stderr. Library code raises; only
src.main converts errors into exit codes.
"""

from __future__ import annotations

from typing import Any


class ExpDiffError(ValueError):
    """Base class for all solver errors."""

    code = "error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def extra(self) -> dict[str, Any]:
        return {}

    def to_dict(self) -> dict[str, Any]:
        return {"code": self.code, "message": self.message, **self.extra()}


# ----------------------------------------------------------------------
# Algebra
# ----------------------------------------------------------------------


class InvalidScalarError(ExpDiffError):
    """A NaN or infinite scalar tried to enter the algebra."""

    code = "invalid_scalar"


class NonFiniteResultError(ExpDiffError):
    """Evaluation overflowed or produced NaN."""

    code = "non_finite_result"


class DegreeOverflowError(ExpDiffError):
    """A coefficient polynomial exceeded the supported degree."""

    code = "degree_overflow"


# ----------------------------------------------------------------------
# Parser
# ----------------------------------------------------------------------


class ParseError(ExpDiffError):
    """Base for parser errors. ``position`` is a byte offset into the input."""

    code = "parse_error"

    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at offset {position}")
        self.reason = message
        self.position = position
        self.text = text

    def extra(self) -> dict[str, Any]:
        return {"position": self.position}

    def caret(self) -> str:
        """Two-line diagnostic pointing at the offending byte."""
        if not self.text:
            return ""
        prefix = self.text.encode("utf-8")[: self.position].decode("utf-8", errors="replace")
        return f"{self.text}\n{' ' * len(prefix)}^"


class ExprSyntaxError(ParseError):
    code = "syntax_error"


class UnsupportedFormError(ParseError):
    """Well-formed input outside the representable class."""

    code = "unsupported_form"


class NonConstantError(ParseError):
    code = "non_constant"


# ----------------------------------------------------------------------
# Equation / Riccati / Nevanlinna
# ----------------------------------------------------------------------


class ParameterError(ExpDiffError):
    """Invalid equation or model parameters. Reports every violation at once."""

    code = "parameter_error"

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations

    def extra(self) -> dict[str, Any]:
        return {"violations": list(self.violations)}


class PoleError(ExpDiffError):
    """Evaluation requested at (or numerically on) a pole."""

    code = "pole"

    def __init__(self, message: str, nearest_pole: complex):
        super().__init__(message)
        self.nearest_pole = nearest_pole

    def extra(self) -> dict[str, Any]:
        return {"nearest_pole": [self.nearest_pole.real, self.nearest_pole.imag]}


class GeometryError(ExpDiffError):
    """A contour would touch a second pole, or cannot be moved off nearby zeros."""

    code = "geometry"


class UndefinedError(ExpDiffError):
    """Quantity undefined for the given input (e.g. zeros of f ≡ 0)."""

    code = "undefined"
