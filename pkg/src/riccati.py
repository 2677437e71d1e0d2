"""The vanishing branch: Riccati equation for t = f′/f and its residue argument.

When the auxiliary function φ_n vanishes identically, t = f′/f satisfies

    t′ + n·t² − (α₁+α₂)·t + α₁α₂/n = 0,

whose constant solutions are t₁ = α₁/n and t₂ = α₂/n. Every other solution
has the form t = t₂ + (t₂−t₁)/(e^{n(t₂−t₁)z+C} − 1) and has simple poles
with residue 1/n. A zero of f of multiplicity k would give f′/f a residue k,
so for n ≥ 2 the non-constant branch cannot come from an entire f.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from numbers import Number

import numpy as np

from src.errors import GeometryError, ParameterError, PoleError
from src.expsum import ExpSum, derive, evaluate, is_zero
from src.models import ContradictionWitness, RiccatiReport, VanishingBranch

logger = logging.getLogger(__name__)

POLE_THRESHOLD = 1e-12
DEFAULT_RESIDUE_NODES = 4096
MAX_RESIDUE_NODES = 2**16
RESIDUE_AGREEMENT = 1e-8
MAX_CONTOUR_RADIUS = 1e-2
INTEGER_TOLERANCE = 1e-6

REQUIRED_MULTIPLICITY = "positive integer multiplicity k"


def _finite(c: complex) -> bool:
    return math.isfinite(c.real) and math.isfinite(c.imag)


@dataclass(frozen=True)
class RiccatiModel:
    """One member of the family: power n, frequencies α₁ ≠ α₂, integration constant C."""

    n: int
    alpha1: complex
    alpha2: complex
    C: complex = 0j  # noqa: N815

    def __post_init__(self):
        violations: list[str] = []
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            violations.append(f"n must be a positive integer, got {self.n!r}")
        for name in ("alpha1", "alpha2", "C"):
            value = complex(getattr(self, name))
            object.__setattr__(self, name, value)
            if not _finite(value):
                violations.append(f"{name} must be finite")
        if not violations and self.alpha1 == self.alpha2:
            violations.append("alpha1 and alpha2 must be distinct")
        if violations:
            raise ParameterError(violations)

    @property
    def t1(self) -> complex:
        return self.alpha1 / self.n

    @property
    def t2(self) -> complex:
        return self.alpha2 / self.n

    @property
    def rate(self) -> complex:
        """n(t₂ − t₁), the coefficient of z in the exponent."""
        return self.n * (self.t2 - self.t1)

    @property
    def pole_spacing(self) -> float:
        return 2 * math.pi / abs(self.rate)

    def pole(self, index: int) -> complex:
        """z_k = (2πik − C) / (n(t₂ − t₁))."""
        return (2j * math.pi * index - self.C) / self.rate

    def nearest_pole_index(self, z: Number) -> int:
        w = (self.rate * complex(z) + self.C) / (2j * math.pi)
        return round(w.real)


def riccati_residual(model: RiccatiModel, t_value: Number, t_prime: Number) -> complex:
    """t′ + n·t² − (α₁+α₂)·t + α₁α₂/n."""
    t = complex(t_value)
    return (
        complex(t_prime)
        + model.n * t * t
        - (model.alpha1 + model.alpha2) * t
        + model.alpha1 * model.alpha2 / model.n
    )


def constant_solutions(n: int, alpha1: Number, alpha2: Number) -> tuple[complex, complex]:
    """(α₁/n, α₂/n)."""
    model = RiccatiModel(n, alpha1, alpha2)
    return model.t1, model.t2


def _exponential(model: RiccatiModel, z: complex) -> complex | None:
    """e^{n(t₂−t₁)z+C}, or None when it overflows (t has reached t₂)."""
    w = model.rate * z + model.C
    if w.real > 700:
        return None
    return cmath.exp(w)


def general_solution(model: RiccatiModel, z: Number) -> complex:
    """t(z) = t₂ + (t₂−t₁)/(e^{n(t₂−t₁)z+C} − 1).

    Raises:
        PoleError: when |e^{…} − 1| < 1e-12; carries the nearest pole.
    """
    z = complex(z)
    e = _exponential(model, z)
    if e is None:
        return model.t2
    denom = e - 1
    if abs(denom) < POLE_THRESHOLD:
        nearest = model.pole(model.nearest_pole_index(z))
        raise PoleError(f"z={z} is a pole of the general solution", nearest)
    return model.t2 + (model.t2 - model.t1) / denom


def general_solution_derivative(model: RiccatiModel, z: Number) -> complex:
    """Closed form t′(z) = −n(t₂−t₁)²·E/(E−1)² with E = e^{n(t₂−t₁)z+C}."""
    z = complex(z)
    e = _exponential(model, z)
    if e is None:
        return 0j
    denom = e - 1
    if abs(denom) < POLE_THRESHOLD:
        nearest = model.pole(model.nearest_pole_index(z))
        raise PoleError(f"z={z} is a pole of the general solution", nearest)
    d = model.t2 - model.t1
    return -model.n * d * d * e / (denom * denom)


def _contour_estimate(
    model: RiccatiModel, center: complex, radius: float, nodes: int
) -> complex:
    theta = 2 * np.pi * np.arange(nodes) / nodes
    ring = np.exp(1j * theta)
    zs = center + radius * ring
    d = model.t2 - model.t1
    with np.errstate(over="ignore"):
        values = model.t2 + d / (np.exp(model.rate * zs + model.C) - 1)
    # (1/2πi)∮ t dz with dz = i·r·e^{iθ}dθ
    return complex(radius * np.sum(values * ring) / nodes)


def residue_at_pole(
    model: RiccatiModel,
    pole_index: int = 0,
    *,
    radius: float | None = None,
    nodes: int = DEFAULT_RESIDUE_NODES,
) -> complex:
    """(1/2πi)∮ t(z) dz around the pole z_k by the trapezoid rule.

    The node count doubles until two successive estimates agree to 1e-8.
    The default radius is min(1e-2, half the spacing to the neighbouring poles).

    Raises:
        GeometryError: if an explicit radius is not positive or reaches the
            neighbouring pole.
    """
    spacing = model.pole_spacing
    if radius is None:
        radius = min(MAX_CONTOUR_RADIUS, spacing / 2)
    elif not 0 < radius < spacing:
        raise GeometryError(
            f"contour radius {radius} must lie in (0, {spacing}) to enclose a single pole"
        )
    center = model.pole(pole_index)
    estimate = _contour_estimate(model, center, radius, nodes)
    while nodes < MAX_RESIDUE_NODES:
        nodes *= 2
        refined = _contour_estimate(model, center, radius, nodes)
        converged = abs(refined - estimate) <= RESIDUE_AGREEMENT * max(1.0, abs(refined))
        estimate = refined
        if converged:
            break
    else:
        logger.warning("residue quadrature stopped at %d nodes without agreement", nodes)
    logger.debug(
        "residue at pole %d (z=%s): %s with %d nodes", pole_index, center, estimate, nodes
    )
    return estimate


def _is_positive_integer(value: complex) -> bool:
    if not _finite(value):
        return False
    k = round(value.real)
    return k >= 1 and abs(value - k) <= INTEGER_TOLERANCE


def contradiction_witness(n: int) -> ContradictionWitness:
    """The residue argument for power n on the model α₁ = n, α₂ = −n, C = 0.

    A residue that is not a positive integer cannot be the multiplicity of a
    zero of f, so the non-constant branch is impossible; for n = 1 the
    residue is 1 and the argument is inconclusive.
    """
    model = RiccatiModel(n, complex(n), complex(-n))
    residue = residue_at_pole(model, 0)
    if _is_positive_integer(residue):
        return ContradictionWitness(
            n=n,
            residue=residue,
            required=REQUIRED_MULTIPLICITY,
            conclusion="residue is a valid multiplicity; non-constant branch not excluded",
            contradiction=False,
            status="inconclusive",
        )
    return ContradictionWitness(
        n=n,
        residue=residue,
        required=REQUIRED_MULTIPLICITY,
        conclusion="non-constant branch impossible",
        contradiction=True,
        status="contradiction",
    )


def riccati_report(
    model: RiccatiModel, pole_index: int = 0, *, nodes: int = DEFAULT_RESIDUE_NODES
) -> RiccatiReport:
    residue = residue_at_pole(model, pole_index, nodes=nodes)
    if not _finite(residue):
        logger.warning("residue at pole %d is not finite: %s", pole_index, residue)
    contradiction = _finite(residue) and not _is_positive_integer(residue)
    return RiccatiReport(
        n=model.n,
        alpha1=model.alpha1,
        alpha2=model.alpha2,
        C=model.C,
        t1=model.t1,
        t2=model.t2,
        pole=model.pole(pole_index),
        residue=residue,
        contradiction=contradiction,
        status="contradiction" if contradiction else "inconclusive",
    )


# ----------------------------------------------------------------------
# Link to exponential polynomials
# ----------------------------------------------------------------------


def auxiliary_function(f: ExpSum, n: int, alpha1: Number, alpha2: Number) -> ExpSum:
    """φ_n = α₁α₂f² − n(α₁+α₂)ff′ + n(n−1)f′² + nff″.

    φ_n = n·f²·R(f′/f) where R is the Riccati residual, so φ_n ≡ 0 exactly
    on the vanishing branch.
    """
    alpha1, alpha2 = complex(alpha1), complex(alpha2)
    df = derive(f)
    ddf = derive(df)
    return (
        f * f * (alpha1 * alpha2)
        - f * df * (n * (alpha1 + alpha2))
        + df * df * (n * (n - 1))
        + f * ddf * n
    )


def vanishing_branch(
    f: ExpSum, n: int, alpha1: Number, alpha2: Number, tau: float = 1e-9
) -> VanishingBranch:
    """Whether φ_n(f) ≡ 0 and, for a single exponential, which constant t it realises."""
    phi = auxiliary_function(f, n, alpha1, alpha2)
    vanishes = is_zero(phi, tau)
    branch = None
    if vanishes and len(f.terms) == 1 and f.terms[0].coeff.is_constant:
        t1, t2 = complex(alpha1) / n, complex(alpha2) / n
        freq = f.terms[0].freq
        if f.tol.freq_close(freq, t1):
            branch = "t1"
        elif f.tol.freq_close(freq, t2):
            branch = "t2"
    phi_max = max((t.coeff.max_abs() for t in phi.terms), default=0.0)
    return VanishingBranch(vanishes=vanishes, branch=branch, phi_max=phi_max)


def log_derivative(f: ExpSum, z: Number) -> complex:
    """f′(z)/f(z).

    Raises:
        PoleError: if f(z) = 0.
    """
    z = complex(z)
    value = evaluate(f, z)
    if value == 0:
        raise PoleError(f"f vanishes at z={z}", z)
    return evaluate(derive(f), z) / value
