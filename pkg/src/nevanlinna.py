"""Numerical Nevanlinna quantities for exponential polynomials.

All functions here are entire, so the characteristic T(r, f) equals the
proximity m(r, f); the counting function N(r, 1/f) is integrated from
argument-principle zero counts on a geometric grid of radii.

Evaluation goes through expsum.evaluate_scaled so that radii where e^{λz}
overflows a float are still usable: f and f′ share one scale factor per
point, which cancels in f′/f and in the argument increments.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from src.errors import GeometryError, ParameterError, UndefinedError
from src.expsum import ExpSum, derive, evaluate, evaluate_scaled, log_abs, shift
from src.models import (
    CharacteristicProfile,
    CountingResult,
    SimpleZeroReport,
    ZeroCount,
    ZeroLocation,
)

logger = logging.getLogger(__name__)

MIN_NODES = 256
MAX_NODES = 2**20
PROXIMITY_RTOL = 1e-6
PROXIMITY_ATOL = 1e-12
SLOPE_FLOOR = 1e-9  # fitted slopes below this are reported as 0

# Argument principle
CIRCLE_MAX_NODES = 2**16
NODES_PER_OSCILLATION = 64
ARC_TOLERANCE = 1e-4  # total trapezoid/log disagreement allowed per contour piece
MIN_ARC_FRACTION = 1e-10
MAX_REFINEMENT_LEVELS = 60
NEAR_ZERO_DISTANCE = 1e-6
NUDGE = 1e-4
MAX_NUDGES = 8

# Counting function
DEFAULT_GRID = 64
GRID_SPAN = 1e3
ZERO_AT_ORIGIN = 1e-12
ORIGIN_OFFSET = 0.1237

# Zero location
SPLIT_FRACTION = 0.4871
SQUARE_OFFSET = complex(0.0137, 0.0093)
RECT_CLEARANCE = 1e-3  # near-zero distance as a fraction of the rectangle size
NEWTON_STEPS = 50

TINY = 1e-12


# ----------------------------------------------------------------------
# Proximity / characteristic
# ----------------------------------------------------------------------


def _circle(r: float, nodes: int, offset: float = 0.0) -> np.ndarray:
    theta = 2 * np.pi * (np.arange(nodes) + offset) / nodes
    return r * np.exp(1j * theta)


def _log_plus_mean(f: ExpSum, zs: np.ndarray) -> float:
    return float(np.mean(np.maximum(log_abs(f, zs), 0.0)))


def proximity_estimate(
    f: ExpSum,
    r: float,
    nodes: int = MIN_NODES,
    *,
    max_nodes: int = MAX_NODES,
    rtol: float = PROXIMITY_RTOL,
    atol: float = PROXIMITY_ATOL,
) -> tuple[float, str | None]:
    """m(r, f) and a warning string when the node cap was reached first.

    Each doubling reuses the previous samples and only evaluates the
    midpoints. Constants are returned exactly without sampling.
    """
    if r <= 0:
        raise ParameterError([f"radius must be positive, got {r}"])
    constant = f.as_constant()
    if constant is not None:
        return max(math.log(abs(constant)), 0.0) if constant else 0.0, None
    nodes = max(int(nodes), 2)
    estimate = _log_plus_mean(f, _circle(r, nodes))
    while nodes < max_nodes:
        midpoints = _log_plus_mean(f, _circle(r, nodes, offset=0.5))
        refined = 0.5 * (estimate + midpoints)
        nodes *= 2
        change = abs(refined - estimate)
        estimate = refined
        if change <= rtol * abs(estimate) + atol:
            return estimate, None
    warning = f"proximity at r={r:g} did not reach rtol={rtol:g} within {max_nodes} nodes"
    logger.warning(warning)
    return estimate, warning


def proximity(
    f: ExpSum, r: float, nodes: int = MIN_NODES, *, max_nodes: int = MAX_NODES
) -> float:
    """m(r, f) = (1/2π)∫ log⁺|f(re^{iθ})| dθ by the trapezoid rule."""
    return proximity_estimate(f, r, nodes, max_nodes=max_nodes)[0]


def characteristic(
    f: ExpSum, r: float, *, min_nodes: int = MIN_NODES, max_nodes: int = MAX_NODES
) -> float:
    """T(r, f); equal to m(r, f) because f is entire."""
    return proximity(f, r, min_nodes, max_nodes=max_nodes)


# ----------------------------------------------------------------------
# Argument principle
# ----------------------------------------------------------------------


@dataclass
class _Increment:
    """Accumulated argument change along a contour piece, in radians."""

    arg: float = 0.0
    trap: float = 0.0
    resolved: bool = True

    def __iadd__(self, other: _Increment) -> _Increment:
        self.arg += other.arg
        self.trap += other.trap
        self.resolved = self.resolved and other.resolved
        return self


Path = Callable[[np.ndarray], np.ndarray]


def _sample(f: ExpSum, df: ExpSum, path: Path, dpath: Path, ts: np.ndarray):
    zs = path(ts)
    g, s = evaluate_scaled(f, zs)
    gd, _ = evaluate_scaled(df, zs, shift=s)
    with np.errstate(divide="ignore", invalid="ignore"):
        w = gd / g * dpath(ts)
        newton = np.abs(g / gd)
    return g, s, w, newton


def _increment(
    f: ExpSum,
    df: ExpSum,
    path: Path,
    dpath: Path,
    t0: float,
    t1: float,
    nodes: int,
    near: float = NEAR_ZERO_DISTANCE,
    max_nodes: int = MAX_NODES,
) -> _Increment:
    """Argument change of f along path(t), t0 ≤ t ≤ t1.

    Arcs are split until the principal log increment stays below π/2 and the
    trapezoid of f′/f·dz agrees with it; an arc that cannot be resolved means
    a zero sits on or next to the path. Refinement stops unresolved once the
    total number of samples would pass max_nodes.
    """
    span = t1 - t0
    ts = np.linspace(t0, t1, nodes + 1)
    g, s, w, newton = _sample(f, df, path, dpath, ts)
    if np.nanmin(newton) < near:
        return _Increment(resolved=False)
    sampled = ts.size
    ta, tb = ts[:-1], ts[1:]
    ga, gb, sa, sb, wa, wb = g[:-1], g[1:], s[:-1], s[1:], w[:-1], w[1:]
    total = _Increment()
    for _ in range(MAX_REFINEMENT_LEVELS):
        width = tb - ta
        with np.errstate(divide="ignore", invalid="ignore"):
            dlog = np.log(gb / ga) + (sb - sa)
            trap = 0.5 * width * (wa + wb)
            ok = (
                np.isfinite(dlog)
                & np.isfinite(trap)
                & (np.abs(dlog.imag) < np.pi / 2)
                & (np.abs(trap - dlog) <= ARC_TOLERANCE * width / span)
            )
        total.arg += float(np.sum(dlog.imag[ok]))
        total.trap += float(np.sum(trap.imag[ok]))
        bad = ~ok
        if not bad.any():
            return total
        sampled += int(bad.sum())
        if np.min(width[bad]) < MIN_ARC_FRACTION * span or sampled > max_nodes:
            total.resolved = False
            return total
        tm = 0.5 * (ta[bad] + tb[bad])
        gm, sm, wm, newton = _sample(f, df, path, dpath, tm)
        if np.nanmin(newton) < near:
            total.resolved = False
            return total
        ta, tb = np.concatenate([ta[bad], tm]), np.concatenate([tm, tb[bad]])
        ga, gb = np.concatenate([ga[bad], gm]), np.concatenate([gm, gb[bad]])
        sa, sb = np.concatenate([sa[bad], sm]), np.concatenate([sm, sb[bad]])
        wa, wb = np.concatenate([wa[bad], wm]), np.concatenate([wm, wb[bad]])
    total.resolved = False
    return total


def _node_count(f: ExpSum, length: float, minimum: int, maximum: int) -> int:
    """Initial samples for a path of the given length: a fixed number per oscillation."""
    max_freq = max((abs(lam) for lam in f.frequencies), default=0.0)
    oscillations = max_freq * length / (2 * np.pi) + max(f.max_degree, 0) + 1
    return int(np.clip(NODES_PER_OSCILLATION * math.ceil(oscillations), minimum, maximum))


def _circle_increment(
    f: ExpSum, df: ExpSum, center: complex, radius: float, max_nodes: int = MAX_NODES
) -> _Increment:
    cap = min(CIRCLE_MAX_NODES, max_nodes)
    nodes = _node_count(f, 2 * np.pi * radius, min(MIN_NODES, cap), cap)

    def path(t: np.ndarray) -> np.ndarray:
        return center + radius * np.exp(1j * t)

    def dpath(t: np.ndarray) -> np.ndarray:
        return 1j * radius * np.exp(1j * t)

    return _increment(f, df, path, dpath, 0.0, 2 * np.pi, nodes, max_nodes=max_nodes)


def _winding(
    f: ExpSum, df: ExpSum, center: complex, radius: float, max_nodes: int = MAX_NODES
) -> ZeroCount:
    """Zero count inside a circle, nudging the radius outward off nearby zeros."""
    current = radius
    nudged = False
    for attempt in range(MAX_NUDGES + 1):
        inc = _circle_increment(f, df, center, current, max_nodes)
        if inc.resolved:
            break
        if attempt == MAX_NUDGES:
            logger.warning(
                "contour |z-%s|=%g stays too close to a zero after %d nudges",
                center,
                current,
                MAX_NUDGES,
            )
            break
        current *= 1 + NUDGE
        nudged = True
        logger.warning("zero near contour |z-%s|=%g; nudging radius to %g", center, radius, current)
    return ZeroCount(
        count=round(inc.arg / (2 * np.pi)),
        radius=current,
        nudged=nudged,
        winding=inc.trap / (2 * np.pi),
    )


def count_zeros(f: ExpSum, r: float, *, max_nodes: int = MAX_NODES) -> ZeroCount:
    """Number of zeros of f in |z| ≤ r by the argument principle.

    Raises:
        UndefinedError: f is identically zero.
    """
    if f.is_empty:
        raise UndefinedError("zeros of the zero function are undefined")
    if r <= 0:
        raise ParameterError([f"radius must be positive, got {r}"])
    return _winding(f, derive(f), 0j, r, max_nodes)


def zero_count(f: ExpSum, r: float) -> int:
    """n(r, 1/f)."""
    return count_zeros(f, r).count


# ----------------------------------------------------------------------
# Counting function
# ----------------------------------------------------------------------


def _off_origin(f: ExpSum) -> tuple[ExpSum, complex]:
    if f.is_empty:
        raise UndefinedError("zeros of the zero function are undefined")
    if abs(evaluate(f, 0)) < ZERO_AT_ORIGIN:
        logger.info("f(0)=0; counting zeros of f(z + %g) instead", ORIGIN_OFFSET)
        return shift(f, ORIGIN_OFFSET), complex(ORIGIN_OFFSET)
    return f, 0j


def _counts_on(
    f: ExpSum, df: ExpSum, radii: np.ndarray, max_nodes: int = MAX_NODES
) -> list[int]:
    counts = [_winding(f, df, 0j, float(t), max_nodes).count for t in radii]
    monotone = np.maximum.accumulate(counts).tolist() if counts else []
    if monotone != counts:
        logger.warning("zero counts were not monotone in r: %s", counts)
    return monotone


def _integrate_counts(radii: np.ndarray, counts: Sequence[int]) -> np.ndarray:
    """Cumulative ∫ n(t)/t dt from the first radius, trapezoid in log t."""
    u = np.log(radii)
    n = np.asarray(counts, dtype=float)
    steps = 0.5 * (n[1:] + n[:-1]) * np.diff(u)
    return np.concatenate([[0.0], np.cumsum(steps)])


def counting_function(
    f: ExpSum, r: float, grid: int = DEFAULT_GRID, *, max_nodes: int = MAX_NODES
) -> CountingResult:
    """N(r, 1/f) = ∫₀^r n(t)/t dt from zero counts on a geometric grid r·10⁻³ … r.

    Zeros inside the innermost grid radius contribute from that radius
    outward only. If f(0) = 0 the argument is shifted by a fixed offset,
    which is reported.
    """
    if r <= 0:
        raise ParameterError([f"radius must be positive, got {r}"])
    if grid < 2:
        raise ParameterError([f"grid needs at least 2 radii, got {grid}"])
    g, offset = _off_origin(f)
    radii = np.geomspace(r / GRID_SPAN, r, grid)
    counts = _counts_on(g, derive(g), radii, max_nodes)
    value = float(_integrate_counts(radii, counts)[-1])
    return CountingResult(value=value, offset=offset, radii=radii.tolist(), counts=counts)


def counting(f: ExpSum, r: float, grid: int = DEFAULT_GRID) -> float:
    return counting_function(f, r, grid).value


# ----------------------------------------------------------------------
# Order and hyper-order
# ----------------------------------------------------------------------


def _fit_orders(radii: np.ndarray, T: np.ndarray) -> tuple[float, float]:  # noqa: N803
    """Least-squares slopes over the upper half of the sweep.

    The hyper-order slope of log log T is taken relative to the slope a pure
    power law with the fitted order would show, so finite-order functions
    report 0 instead of the slowly decaying 1/log r drift.
    """
    half = len(radii) // 2
    lr_all, t_all = np.log(radii[half:]), T[half:]
    mask = t_all > TINY
    if mask.sum() < 2:
        return 0.0, 0.0
    lr, lt = lr_all[mask], np.log(t_all[mask])
    order, intercept = np.polyfit(lr, lt, 1)
    order = float(order) if order > SLOPE_FLOOR else 0.0

    hyper = 0.0
    above = lt > 0
    if above.sum() >= 2:
        raw = np.polyfit(lr[above], np.log(lt[above]), 1)[0]
        fitted = intercept + order * lr[above]
        baseline = np.polyfit(lr[above], np.log(fitted), 1)[0] if np.all(fitted > 0) else 0.0
        hyper = float(raw - baseline) if raw - baseline > SLOPE_FLOOR else 0.0
    return order, hyper


def _check_sweep(radii: np.ndarray) -> list[str]:
    problems = []
    if radii.size < 8:
        problems.append(f"order fit needs at least 8 radii, got {radii.size}")
    if radii.size and (np.any(radii <= 0) or np.any(np.diff(radii) <= 0)):
        problems.append("radii must be positive and increasing")
    elif radii.size and radii[-1] / radii[0] < 100:
        problems.append("radii must span a factor of at least 100")
    return problems


def order_estimates(
    f: ExpSum,
    radii: Sequence[float],
    *,
    min_nodes: int = MIN_NODES,
    max_nodes: int = MAX_NODES,
) -> tuple[float, float]:
    """(order, hyper-order) from the growth of T(r, f) across radii.

    Constants give exactly (0, 0).

    Raises:
        ParameterError: fewer than 8 radii, not increasing, or spanning less
            than a factor of 100.
    """
    arr = np.asarray(radii, dtype=float)
    problems = _check_sweep(arr)
    if problems:
        raise ParameterError(problems)
    if f.as_constant() is not None:
        return 0.0, 0.0
    T = np.array(  # noqa: N806
        [characteristic(f, float(r), min_nodes=min_nodes, max_nodes=max_nodes) for r in arr]
    )
    return _fit_orders(arr, T)


def characteristic_profile(
    f: ExpSum,
    r_min: float,
    r_max: float,
    points: int = 16,
    grid: int = DEFAULT_GRID,
    *,
    min_nodes: int = MIN_NODES,
    max_nodes: int = MAX_NODES,
) -> CharacteristicProfile:
    """m, n, N and T over a geometric sweep plus order estimates.

    The counting grid is shared across the sweep: it runs from r_min·10⁻³ to
    r_max with the density counting_function uses, and contains every sweep
    radius so N(r) is the cumulative integral up to exactly r.
    """
    if not 0 < r_min < r_max:
        raise ParameterError([f"need 0 < r_min < r_max, got {r_min}, {r_max}"])
    if points < 2:
        raise ParameterError([f"need at least 2 points, got {points}"])
    radii = np.geomspace(r_min, r_max, points)
    warnings = [f"order estimate unreliable: {p}" for p in _check_sweep(radii)]

    m_vals: list[float] = []
    for r in radii:
        value, warning = proximity_estimate(f, float(r), min_nodes, max_nodes=max_nodes)
        m_vals.append(value)
        if warning:
            warnings.append(warning)

    g, offset = _off_origin(f)
    if offset:
        warnings.append(f"f(0)=0: counting uses f(z + {offset.real:g})")
    decades = math.log(r_max / (r_min / GRID_SPAN)) / math.log(GRID_SPAN)
    base = np.geomspace(r_min / GRID_SPAN, r_max, max(grid, math.ceil(grid * decades)))
    shared = np.union1d(base, radii)
    counts = _counts_on(g, derive(g), shared, max_nodes)
    cumulative = _integrate_counts(shared, counts)
    index = np.searchsorted(shared, radii)
    n_counts = [counts[i] for i in index]
    N_vals = [float(cumulative[i]) for i in index]  # noqa: N806

    order, hyper = _fit_orders(radii, np.asarray(m_vals))
    logger.info("profile r=%g..%g: order %.3f, hyper-order %.3f", r_min, r_max, order, hyper)
    return CharacteristicProfile(
        radii=radii.tolist(),
        m_vals=m_vals,
        n_counts=n_counts,
        N_vals=N_vals,
        T_vals=list(m_vals),
        order_est=order,
        hyper_order_est=hyper,
        offset=offset,
        warnings=warnings,
    )


# ----------------------------------------------------------------------
# Zero location
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class _Rect:
    lo: complex
    hi: complex

    @property
    def center(self) -> complex:
        return 0.5 * (self.lo + self.hi)

    @property
    def size(self) -> float:
        return max(self.hi.real - self.lo.real, self.hi.imag - self.lo.imag)

    def contains(self, z: complex) -> bool:
        return self.lo.real <= z.real <= self.hi.real and self.lo.imag <= z.imag <= self.hi.imag

    def split(self) -> tuple[_Rect, _Rect]:
        width, height = self.hi.real - self.lo.real, self.hi.imag - self.lo.imag
        if width >= height:
            cut = self.lo.real + SPLIT_FRACTION * width
            return (
                _Rect(self.lo, complex(cut, self.hi.imag)),
                _Rect(complex(cut, self.lo.imag), self.hi),
            )
        cut = self.lo.imag + SPLIT_FRACTION * height
        return (
            _Rect(self.lo, complex(self.hi.real, cut)),
            _Rect(complex(self.lo.real, cut), self.hi),
        )

    def corners(self) -> list[complex]:
        return [
            self.lo,
            complex(self.hi.real, self.lo.imag),
            self.hi,
            complex(self.lo.real, self.hi.imag),
        ]


def _rect_count(
    f: ExpSum, df: ExpSum, rect: _Rect, max_nodes: int = MAX_NODES
) -> int | None:
    """Zeros inside rect, or None when a zero sits on its boundary or the cap is hit."""
    corners = rect.corners()
    near = min(NEAR_ZERO_DISTANCE, RECT_CLEARANCE * rect.size)
    total = _Increment()
    for a, b in zip(corners, corners[1:] + corners[:1], strict=True):
        nodes = _node_count(f, abs(b - a), 32, min(CIRCLE_MAX_NODES, max_nodes))

        def path(t: np.ndarray, a: complex = a, b: complex = b) -> np.ndarray:
            return a + t * (b - a)

        def dpath(t: np.ndarray, a: complex = a, b: complex = b) -> np.ndarray:
            return np.full(t.shape, b - a, dtype=complex)

        total += _increment(f, df, path, dpath, 0.0, 1.0, nodes, near, max_nodes)
        if not total.resolved:
            return None
    return round(total.arg / (2 * np.pi))


def _newton(f: ExpSum, df: ExpSum, z: complex, rect: _Rect) -> complex | None:
    for _ in range(NEWTON_STEPS):
        g, s = evaluate_scaled(f, np.array([z]))
        gd, _ = evaluate_scaled(df, np.array([z]), shift=s)
        if gd[0] == 0:
            return None
        step = complex(g[0] / gd[0])
        z -= step
        if not rect.contains(z):
            return None
        if abs(step) <= 1e-13 * max(1.0, abs(z)):
            return z
    return None


def _resolve(
    f: ExpSum, df: ExpSum, rect: _Rect, max_nodes: int
) -> tuple[_Rect, int] | None:
    """Count zeros in rect, growing it past boundary zeros; None when that keeps failing."""
    for _ in range(MAX_NUDGES + 1):
        count = _rect_count(f, df, rect, max_nodes)
        if count is not None:
            return rect, count
        pad = complex(1, 1) * rect.size * NUDGE * 10
        rect = _Rect(rect.lo - pad, rect.hi + pad)
    return None


def locate_zeros(
    f: ExpSum, r: float, min_size: float = 1e-6, *, max_nodes: int = MAX_NODES
) -> list[ZeroLocation]:
    """Zeros of f in |z| ≤ r by recursive rectangle subdivision.

    Rectangles with one zero are finished by Newton's method; clusters that
    survive down to min_size are reported with their total multiplicity. A
    rectangle whose halves cannot be counted within max_nodes samples is
    reported as a cluster at its own size. Results are sorted by (Re, Im).

    Raises:
        UndefinedError: f is identically zero.
        GeometryError: the enclosing square itself cannot be counted.
    """
    if f.is_empty:
        raise UndefinedError("zeros of the zero function are undefined")
    df = derive(f)
    half = 1.05 * r
    corner = complex(half, half)
    start = _resolve(
        f, df, _Rect(SQUARE_OFFSET * r - corner, SQUARE_OFFSET * r + corner), max_nodes
    )
    if start is None:
        raise GeometryError(f"zero count on the square around |z| <= {r:g} did not resolve")
    found: list[ZeroLocation] = []
    stack = [start]
    while stack:
        rect, count = stack.pop()
        if count <= 0:
            continue
        if count == 1:
            z = _newton(f, df, rect.center, rect)
            if z is not None:
                found.append(ZeroLocation(center=z, multiplicity=1, size=rect.size))
                continue
        if rect.size > min_size:
            children = [_resolve(f, df, child, max_nodes) for child in rect.split()]
            if all(child is not None for child in children):
                stack.extend(children)
                continue
            logger.warning("zeros in %s cannot be separated further; kept as a cluster", rect)
        found.append(ZeroLocation(center=rect.center, multiplicity=count, size=rect.size))
    inside = [z for z in found if abs(z.center) <= r]
    return sorted(_dedupe(inside, min_size), key=lambda z: (z.center.real, z.center.imag))


def _reach(z: ZeroLocation) -> float:
    """How far a repeat of z may sit from it; clusters cover their own rectangle."""
    return z.size if z.multiplicity > 1 else 0.0


def _dedupe(zeros: list[ZeroLocation], min_size: float) -> list[ZeroLocation]:
    """Drop repeats produced when enlarged rectangles overlap their siblings."""
    kept: list[ZeroLocation] = []
    for z in zeros:
        floor = max(min_size, 1e-9 * abs(z.center))
        if all(abs(z.center - k.center) > max(floor, _reach(z), _reach(k)) for k in kept):
            kept.append(z)
    return kept


def simple_zero_report(
    f: ExpSum, r: float, min_size: float = 1e-6, *, max_nodes: int = MAX_NODES
) -> SimpleZeroReport:
    """Locate the zeros in |z| ≤ r and measure each one's multiplicity.

    Multiplicity is the winding number of f on a small circle around the
    zero, with radius below half the distance to its nearest neighbour.
    """
    zeros = locate_zeros(f, r, min_size, max_nodes=max_nodes)
    df = derive(f)
    measured: list[ZeroLocation] = []
    centers = np.array([z.center for z in zeros], dtype=complex)
    for i, z in enumerate(zeros):
        others = np.delete(centers, i)
        gap = float(np.min(np.abs(others - z.center))) if others.size else 1.0
        radius = min(1e-3, 0.5 * gap)
        winding = _winding(f, df, z.center, radius, max_nodes)
        measured.append(ZeroLocation(center=z.center, multiplicity=winding.count, size=radius))
    report = SimpleZeroReport(radius=r, zeros=measured)
    if not report.all_simple:
        logger.warning("%d multiple zero(s) in |z| <= %g", len(report.multiple), r)
    return report
