"""Exponential polynomials  Σ p_i(z)·e^{λ_i z}  over the complex numbers.

Provides PolyC (dense complex polynomials), ExpTerm and ExpSum with a
canonical form, exact-up-to-tolerance zero testing, evaluation (scalar,
vectorised and overflow-free scaled), and the calculus operators the
difference equations need: product, power, derivative, shift and forward
difference.

All values are immutable. Every public operation returns a canonical ExpSum:
frequencies pairwise separated by more than the frequency tolerance, terms
sorted by (Re λ, Im λ), and no zero coefficient polynomials.
"""

from __future__ import annotations

import cmath
import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from numbers import Number

import numpy as np
from numpy.polynomial import polynomial as npoly

from src.errors import DegreeOverflowError, InvalidScalarError, NonFiniteResultError

logger = logging.getLogger(__name__)

# Coefficient polynomials only grow through multiplication and parser input.
MAX_DEGREE = 64

DEFAULT_TOL_FREQ = 1e-9
DEFAULT_TOL_COEFF = 1e-12


@dataclass(frozen=True)
class Tolerances:
    """Relative tolerances used by canonicalization.

    freq: two frequencies λ, μ collide when |λ−μ| ≤ freq·max(1, |λ|, |μ|).
    coeff: a coefficient c is dropped when |c| ≤ coeff·scale.
    """

    freq: float = DEFAULT_TOL_FREQ
    coeff: float = DEFAULT_TOL_COEFF

    def freq_close(self, a: complex, b: complex) -> bool:
        return abs(a - b) <= self.freq * max(1.0, abs(a), abs(b))


DEFAULT_TOLERANCES = Tolerances()


def check_scalar(value: Number) -> complex:
    """Coerce to complex, rejecting NaN and infinities."""
    c = complex(value)
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise InvalidScalarError(f"non-finite scalar {c!r}")
    return c


def _sort_key(freq: complex) -> tuple[float, float]:
    return (freq.real, freq.imag)


# ----------------------------------------------------------------------
# PolyC
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class PolyC:
    """Dense polynomial in z, coefficients lowest power first.

    The empty tuple is the zero polynomial. Exact trailing zeros are stripped
    on construction; trimmed() applies a magnitude threshold.
    """

    coeffs: tuple[complex, ...] = ()

    def __post_init__(self):
        coeffs = tuple(check_scalar(c) for c in self.coeffs)
        n = len(coeffs)
        while n and coeffs[n - 1] == 0:
            n -= 1
        coeffs = coeffs[:n]
        if n - 1 > MAX_DEGREE:
            raise DegreeOverflowError(
                f"coefficient degree {n - 1} exceeds the supported maximum {MAX_DEGREE}"
            )
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def constant(cls, value: Number) -> PolyC:
        return cls((value,))

    @classmethod
    def z(cls) -> PolyC:
        return cls((0, 1))

    @classmethod
    def from_array(cls, arr) -> PolyC:
        return cls(tuple(complex(c) for c in np.atleast_1d(arr)))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_constant(self) -> bool:
        return self.degree <= 0

    def _array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=complex)

    def max_abs(self) -> float:
        return max((abs(c) for c in self.coeffs), default=0.0)

    def trimmed(self, threshold: float) -> PolyC:
        """Zero every coefficient with magnitude ≤ threshold."""
        if all(abs(c) > threshold for c in self.coeffs):
            return self
        return PolyC(tuple(0j if abs(c) <= threshold else c for c in self.coeffs))

    def __add__(self, other: PolyC) -> PolyC:
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        return PolyC.from_array(npoly.polyadd(self._array(), other._array()))

    def __neg__(self) -> PolyC:
        return PolyC(tuple(-c for c in self.coeffs))

    def __sub__(self, other: PolyC) -> PolyC:
        return self + (-other)

    def __mul__(self, other: PolyC | Number) -> PolyC:
        if isinstance(other, PolyC):
            if self.is_zero or other.is_zero:
                return PolyC()
            if self.degree + other.degree > MAX_DEGREE:
                raise DegreeOverflowError(
                    f"product degree {self.degree + other.degree} exceeds {MAX_DEGREE}"
                )
            return PolyC.from_array(npoly.polymul(self._array(), other._array()))
        scalar = check_scalar(other)
        return PolyC(tuple(c * scalar for c in self.coeffs))

    __rmul__ = __mul__

    def derivative(self) -> PolyC:
        if self.degree < 1:
            return PolyC()
        return PolyC.from_array(npoly.polyder(self._array()))

    def shift(self, c: Number) -> PolyC:
        """Return p(z + c), by Horner composition with (z + c)."""
        c = check_scalar(c)
        if self.is_constant:
            return self
        result = np.zeros(1, dtype=complex)
        step = np.array([c, 1], dtype=complex)
        for a in reversed(self.coeffs):
            result = npoly.polyadd(npoly.polymul(result, step), [a])
        return PolyC.from_array(result)

    def __call__(self, z: complex) -> complex:
        if self.is_zero:
            return 0j
        acc = 0j
        for a in reversed(self.coeffs):
            acc = acc * z + a
        return acc

    def evaluate_many(self, zs: np.ndarray) -> np.ndarray:
        if self.is_zero:
            return np.zeros_like(zs, dtype=complex)
        return npoly.polyval(zs, self._array())


# ----------------------------------------------------------------------
# ExpTerm / ExpSum
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class ExpTerm:
    """One summand  coeff(z)·e^{freq·z}."""

    freq: complex
    coeff: PolyC

    def __post_init__(self):
        object.__setattr__(self, "freq", check_scalar(self.freq))
        if self.coeff.is_zero:
            raise ValueError("ExpTerm coefficient must be a nonzero polynomial")


RawTerm = ExpTerm | tuple[Number, PolyC]


@dataclass(frozen=True)
class ExpSum:
    """Canonical exponential polynomial.

    Build through normalize() or the classmethod constructors; the raw
    dataclass constructor does not canonicalize. ``scale`` is the largest
    coefficient magnitude seen while building the value (at least 1) and is
    the reference for relative zero tests.
    """

    terms: tuple[ExpTerm, ...] = ()
    scale: float = 1.0
    tol: Tolerances = DEFAULT_TOLERANCES

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, tol: Tolerances = DEFAULT_TOLERANCES) -> ExpSum:
        return cls((), 1.0, tol)

    @classmethod
    def constant(cls, value: Number, tol: Tolerances = DEFAULT_TOLERANCES) -> ExpSum:
        return normalize([(0j, PolyC.constant(value))], tol)

    @classmethod
    def exponential(
        cls,
        coeff: Number,
        freq: Number,
        degree: int = 0,
        tol: Tolerances = DEFAULT_TOLERANCES,
    ) -> ExpSum:
        """coeff · z^degree · e^{freq·z}."""
        poly = PolyC(tuple([0j] * degree) + (complex(coeff),))
        return normalize([(freq, poly)], tol)

    @classmethod
    def from_poly(cls, poly: PolyC, tol: Tolerances = DEFAULT_TOLERANCES) -> ExpSum:
        return normalize([(0j, poly)], tol)

    # -- inspection ---------------------------------------------------

    @property
    def frequencies(self) -> tuple[complex, ...]:
        return tuple(t.freq for t in self.terms)

    @property
    def is_empty(self) -> bool:
        return not self.terms

    def as_poly(self) -> PolyC | None:
        """The polynomial this ExpSum equals, or None if an exponential is present."""
        if not self.terms:
            return PolyC()
        if len(self.terms) == 1 and self.terms[0].freq == 0:
            return self.terms[0].coeff
        return None

    def as_constant(self) -> complex | None:
        poly = self.as_poly()
        if poly is None or not poly.is_constant:
            return None
        return poly.coeffs[0] if poly.coeffs else 0j

    @property
    def max_degree(self) -> int:
        return max((t.coeff.degree for t in self.terms), default=-1)

    def with_tolerances(self, tol: Tolerances) -> ExpSum:
        return normalize(self.terms, tol, scale=self.scale)

    # -- operators ----------------------------------------------------

    def _coerce(self, other) -> ExpSum:
        if isinstance(other, ExpSum):
            return other
        return ExpSum.constant(other, self.tol)

    def __add__(self, other) -> ExpSum:
        return add(self, self._coerce(other))

    __radd__ = __add__

    def __neg__(self) -> ExpSum:
        return scale_by(self, -1)

    def __sub__(self, other) -> ExpSum:
        return add(self, -self._coerce(other))

    def __rsub__(self, other) -> ExpSum:
        return add(self._coerce(other), -self)

    def __mul__(self, other) -> ExpSum:
        if isinstance(other, ExpSum):
            return mul(self, other)
        if isinstance(other, PolyC):
            return mul(self, ExpSum.from_poly(other, self.tol))
        return scale_by(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> ExpSum:
        return power(self, k)

    def __call__(self, z: Number) -> complex:
        return evaluate(self, z)


# ----------------------------------------------------------------------
# Canonicalization
# ----------------------------------------------------------------------


def _cell(freq: complex, reach: float) -> tuple[int, int] | complex:
    if reach <= 0:
        return freq
    return (math.floor(freq.real / reach), math.floor(freq.imag / reach))


def _close_pairs(freqs: Sequence[complex], tol: Tolerances) -> list[tuple[int, int]]:
    """Index pairs (i, j), i < j, whose frequencies collide.

    Frequencies are hashed onto a grid whose cell is the widest possible
    collision radius, so only the 3×3 neighbouring cells are compared.
    """
    if len(freqs) < 2:
        return []
    reach = tol.freq * max(1.0, max(abs(f) for f in freqs))
    cells: dict[tuple[int, int] | complex, list[int]] = {}
    close: list[tuple[int, int]] = []
    for j, freq in enumerate(freqs):
        cell = _cell(freq, reach)
        if isinstance(cell, tuple):
            cx, cy = cell
            neighbours = [(cx + dx, cy + dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1)]
        else:
            neighbours = [cell]
        for key in neighbours:
            close.extend((i, j) for i in cells.get(key, ()) if tol.freq_close(freqs[i], freq))
        cells.setdefault(cell, []).append(j)
    return close


def _cluster(pairs: list[tuple[complex, PolyC]], tol: Tolerances) -> list[list[tuple]]:
    """Connected components of the collision graph, members in input order."""
    parent = list(range(len(pairs)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in _close_pairs([f for f, _ in pairs], tol):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    clusters: dict[int, list[tuple[complex, PolyC]]] = {}
    for k, pair in enumerate(pairs):
        clusters.setdefault(find(k), []).append(pair)
    return list(clusters.values())


def _merge(cluster: list[tuple[complex, PolyC]]) -> tuple[complex, PolyC]:
    if len(cluster) == 1:
        return cluster[0]
    weights = [coeff.max_abs() for _, coeff in cluster]
    total_weight = sum(weights)
    if len({f for f, _ in cluster}) == 1:
        freq = cluster[0][0]
    elif total_weight > 0:
        freq = sum(w * f for w, (f, _) in zip(weights, cluster, strict=True)) / total_weight
    else:
        freq = sum(f for f, _ in cluster) / len(cluster)
    coeff = PolyC()
    for _, c in cluster:
        coeff = coeff + c
    return freq, coeff


def _separated(pairs: Sequence[tuple[complex, PolyC]], tol: Tolerances) -> bool:
    return not _close_pairs([f for f, _ in pairs], tol)


def normalize(
    raw_terms: Iterable[RawTerm],
    tol: Tolerances = DEFAULT_TOLERANCES,
    *,
    scale: float = 1.0,
) -> ExpSum:
    """Canonicalize a collection of terms into an ExpSum.

    Frequencies within tolerance are merged (coefficients added, merged
    frequency is the coefficient-magnitude-weighted mean), coefficients at or
    below tol.coeff·scale are dropped, and terms are sorted by (Re λ, Im λ).
    Idempotent: normalize(x.terms, x.tol, scale=x.scale) == x.

    Raises:
        InvalidScalarError: if any frequency or coefficient is not finite.
    """
    pairs: list[tuple[complex, PolyC]] = []
    for term in raw_terms:
        if isinstance(term, ExpTerm):
            freq, coeff = term.freq, term.coeff
        else:
            freq, coeff = term
        freq = check_scalar(freq)
        if not isinstance(coeff, PolyC):
            coeff = PolyC.constant(coeff)
        if coeff.is_zero:
            continue
        scale = max(scale, coeff.max_abs())
        pairs.append((freq, coeff))
    scale = max(1.0, float(scale))

    pairs.sort(
        key=lambda p: (_sort_key(p[0]), tuple((c.real, c.imag) for c in p[1].coeffs))
    )
    # Merged frequencies can drift into range of a neighbour; repeat until
    # every pair is separated. Each extra pass removes at least one term.
    while True:
        merged = [_merge(cluster) for cluster in _cluster(pairs, tol)]
        # scale covers merged coefficients too, so renormalizing keeps it fixed
        scale = max([scale, *(c.max_abs() for _, c in merged)])
        threshold = tol.coeff * scale
        merged = [(f, c.trimmed(threshold)) for f, c in merged]
        pairs = sorted(
            ((f, c) for f, c in merged if not c.is_zero), key=lambda p: _sort_key(p[0])
        )
        if _separated(pairs, tol):
            break

    terms = tuple(ExpTerm(f, c) for f, c in pairs)
    return ExpSum(terms, scale, tol)


# ----------------------------------------------------------------------
# Algebra
# ----------------------------------------------------------------------


def add(a: ExpSum, b: ExpSum) -> ExpSum:
    return normalize(a.terms + b.terms, a.tol, scale=max(a.scale, b.scale))


def scale_by(a: ExpSum, c: Number) -> ExpSum:
    c = check_scalar(c)
    return normalize(
        [(t.freq, t.coeff * c) for t in a.terms], a.tol, scale=a.scale * max(1.0, abs(c))
    )


def mul(a: ExpSum, b: ExpSum) -> ExpSum:
    """Termwise product: frequencies add, coefficient polynomials multiply."""
    raw = [(ta.freq + tb.freq, ta.coeff * tb.coeff) for ta in a.terms for tb in b.terms]
    return normalize(raw, a.tol, scale=max(a.scale, b.scale))


def power(a: ExpSum, k: int) -> ExpSum:
    """a^k for a nonnegative integer k; power(a, 0) is the constant 1."""
    if isinstance(k, bool) or not isinstance(k, int) or k < 0:
        raise ValueError(f"exponent must be a nonnegative integer, got {k!r}")
    result = ExpSum.constant(1, a.tol)
    base = a
    while k:
        if k & 1:
            result = mul(result, base)
        k >>= 1
        if k:
            base = mul(base, base)
    return result


def derive(a: ExpSum) -> ExpSum:
    """d/dz: p(z)e^{λz} ↦ (p′(z) + λp(z))e^{λz}."""
    raw = [(t.freq, t.coeff.derivative() + t.coeff * t.freq) for t in a.terms]
    return normalize(raw, a.tol, scale=a.scale)


def _exp(w: complex) -> complex:
    try:
        value = cmath.exp(w)
    except OverflowError as exc:
        raise NonFiniteResultError(f"exp({w}) overflows") from exc
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise NonFiniteResultError(f"exp({w}) is not finite")
    return value


def shift(a: ExpSum, c: Number) -> ExpSum:
    """z ↦ z + c: p(z)e^{λz} ↦ p(z+c)e^{λc}e^{λz}."""
    c = check_scalar(c)
    raw = [(t.freq, t.coeff.shift(c) * _exp(t.freq * c)) for t in a.terms]
    return normalize(raw, a.tol, scale=a.scale)


def delta(a: ExpSum) -> ExpSum:
    """Forward difference Δa(z) = a(z+1) − a(z)."""
    return add(shift(a, 1), scale_by(a, -1))


# ----------------------------------------------------------------------
# Evaluation
# ----------------------------------------------------------------------


def evaluate(a: ExpSum, z: Number) -> complex:
    """Σ p_i(z)e^{λ_i z} by direct summation."""
    z = check_scalar(z)
    total = 0j
    for t in a.terms:
        total += t.coeff(z) * _exp(t.freq * z)
    if not (math.isfinite(total.real) and math.isfinite(total.imag)):
        raise NonFiniteResultError(f"value at z={z} is not finite")
    return total


def evaluate_many(a: ExpSum, zs) -> np.ndarray:
    zs = np.asarray(zs, dtype=complex)
    total = np.zeros_like(zs, dtype=complex)
    with np.errstate(over="ignore", invalid="ignore"):
        for t in a.terms:
            total = total + t.coeff.evaluate_many(zs) * np.exp(t.freq * zs)
    if not np.all(np.isfinite(total)):
        raise NonFiniteResultError("evaluation overflowed; use evaluate_scaled")
    return total


def evaluate_scaled(a: ExpSum, zs, shift: np.ndarray | None = None):
    """Overflow-free evaluation: returns (g, s) with a(z) = g(z)·e^{s(z)}.

    s defaults to max_i Re(λ_i z); pass an explicit ``shift`` to evaluate a
    related function (e.g. the derivative) on the same scale.
    """
    zs = np.asarray(zs, dtype=complex)
    if not a.terms:
        zero = np.zeros(zs.shape, dtype=float)
        return np.zeros(zs.shape, dtype=complex), zero if shift is None else shift
    freqs = np.array(a.frequencies, dtype=complex)
    exponents = np.multiply.outer(freqs, zs)
    if shift is None:
        shift = exponents.real.max(axis=0)
    g = np.zeros(zs.shape, dtype=complex)
    with np.errstate(over="ignore", under="ignore"):
        for t, e in zip(a.terms, exponents, strict=True):
            g = g + t.coeff.evaluate_many(zs) * np.exp(e - shift)
    return g, shift


def log_abs(a: ExpSum, zs) -> np.ndarray:
    """log|a(z)| without overflow; -inf where a vanishes exactly."""
    g, s = evaluate_scaled(a, zs)
    with np.errstate(divide="ignore"):
        return np.log(np.abs(g)) + s


# ----------------------------------------------------------------------
# Zero test
# ----------------------------------------------------------------------


def max_coeff_magnitude(a: ExpSum) -> float:
    return max((t.coeff.max_abs() for t in a.terms), default=0.0)


def is_zero(a: ExpSum, tau: float | None = None) -> bool:
    """Borel zero test: a ≡ 0 iff every coefficient of every term vanishes.

    Distinct frequencies are linearly independent over polynomials, so it is
    enough to compare each coefficient against tau·scale.
    """
    if tau is None:
        tau = a.tol.coeff
    return max_coeff_magnitude(a) <= tau * a.scale


def equivalent(a: ExpSum, b: ExpSum, tau: float | None = None) -> bool:
    """True when a − b passes is_zero."""
    return is_zero(a - b, tau)
