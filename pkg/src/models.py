"""Result envelopes shared by the library and the CLI.

Every envelope is a dataclass with a to_dict() producing JSON-ready values:
complex scalars are rendered in the expression language (render_complex) and
exponential polynomials through render(), so any function in the output can
be pasted back into a command.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import asdict, dataclass, field
from typing import TYPE_CHECKING, Any

from src.expsum import ExpSum
from src.parser import render, render_complex

if TYPE_CHECKING:
    from src.equation import EquationParams


@dataclass
class VerificationReport:
    """Outcome of substituting a candidate into the equation.

    is_solution holds exactly when residual_max ≤ tolerance·scale.
    """

    is_solution: bool
    residual_max: float
    residual: ExpSum
    tolerance: float
    scale: float

    def to_dict(self) -> dict:
        return {
            "is_solution": self.is_solution,
            "residual_max": self.residual_max,
            "residual": render(self.residual),
            "tolerance": self.tolerance,
            "scale": self.scale,
        }


@dataclass
class SolutionCase:
    """One certified solution together with the constants that produced it."""

    case_label: str
    solution: ExpSum
    constants: dict[str, complex]
    constraints_checked: list[tuple[str, float]] = field(default_factory=list)
    verification: VerificationReport | None = None

    @property
    def max_violation(self) -> float:
        return max((v for _, v in self.constraints_checked), default=0.0)

    def sort_key(self) -> tuple:
        return (
            self.case_label,
            tuple((c.real, c.imag) for _, c in sorted(self.constants.items())),
        )

    def to_dict(self) -> dict:
        d: dict[str, Any] = {
            "case": self.case_label,
            "f": render(self.solution),
            "constants": {k: render_complex(v) for k, v in sorted(self.constants.items())},
            "constraints": {name: value for name, value in self.constraints_checked},
            "max_violation": self.max_violation,
        }
        if self.verification is not None:
            d["residual_max"] = self.verification.residual_max
        return d


@dataclass
class Candidates:
    """Cases emitted by one candidate family plus the notes explaining gaps.

    Iterates and indexes like the list of cases.
    """

    cases: list[SolutionCase] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def __iter__(self) -> Iterator[SolutionCase]:
        return iter(self.cases)

    def __len__(self) -> int:
        return len(self.cases)

    def __getitem__(self, index: int) -> SolutionCase:
        return self.cases[index]


@dataclass
class Classification:
    """Every certified solution for one parameter set."""

    params: EquationParams
    q_is_constant: bool
    solutions: list[SolutionCase] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def labels(self) -> list[str]:
        return [case.case_label for case in self.solutions]

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "q_is_constant": self.q_is_constant,
            "solutions": [case.to_dict() for case in self.solutions],
            "notes": list(self.notes),
        }


# ----------------------------------------------------------------------
# Nevanlinna quantities
# ----------------------------------------------------------------------


@dataclass
class ZeroCount:
    """Zeros inside |z| ≤ radius.

    winding is the unrounded contour integral; radius differs from the
    requested one when the contour was nudged off a zero.
    """

    count: int
    radius: float
    nudged: bool = False
    winding: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ZeroLocation:
    center: complex
    multiplicity: int
    size: float

    def to_dict(self) -> dict:
        return {
            "center": render_complex(self.center),
            "multiplicity": self.multiplicity,
            "size": self.size,
        }


@dataclass
class SimpleZeroReport:
    radius: float
    zeros: list[ZeroLocation]

    @property
    def all_simple(self) -> bool:
        return all(z.multiplicity == 1 for z in self.zeros)

    @property
    def multiple(self) -> list[ZeroLocation]:
        return [z for z in self.zeros if z.multiplicity != 1]

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "zero_count": sum(z.multiplicity for z in self.zeros),
            "all_simple": self.all_simple,
            "multiple": [z.to_dict() for z in self.multiple],
        }


@dataclass
class CountingResult:
    """N(r, 1/f) with the zero-count grid it was integrated from.

    offset is the shift applied to the argument when f vanishes at 0.
    """

    value: float
    offset: complex
    radii: list[float]
    counts: list[int]

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "offset": render_complex(self.offset),
            "radii": list(self.radii),
            "counts": list(self.counts),
        }


@dataclass
class CharacteristicProfile:
    radii: list[float]
    m_vals: list[float]
    n_counts: list[int]
    N_vals: list[float]  # noqa: N815
    T_vals: list[float]  # noqa: N815
    order_est: float
    hyper_order_est: float
    offset: complex = 0j
    warnings: list[str] = field(default_factory=list)

    def rows(self) -> list[dict[str, float]]:
        """One record per radius, columns r, m, n, N, T."""
        return [
            {"r": r, "m": m, "n": n, "N": big_n, "T": t}
            for r, m, n, big_n, t in zip(
                self.radii, self.m_vals, self.n_counts, self.N_vals, self.T_vals, strict=True
            )
        ]

    def summary(self) -> dict:
        return {
            "order": self.order_est,
            "hyper_order": self.hyper_order_est,
            "offset": render_complex(self.offset),
            "warnings": list(self.warnings),
        }

    def to_dict(self) -> dict:
        return {**self.summary(), "rows": self.rows()}


# ----------------------------------------------------------------------
# Riccati branch
# ----------------------------------------------------------------------


@dataclass
class ContradictionWitness:
    """Structured form of the residue argument for one power n."""

    n: int
    residue: complex
    required: str
    conclusion: str
    contradiction: bool
    status: str

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "residue": render_complex(self.residue),
            "required": self.required,
            "conclusion": self.conclusion,
            "contradiction": self.contradiction,
            "status": self.status,
        }


@dataclass
class RiccatiReport:
    n: int
    alpha1: complex
    alpha2: complex
    C: complex  # noqa: N815
    t1: complex
    t2: complex
    pole: complex
    residue: complex
    contradiction: bool
    status: str

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "alpha1": render_complex(self.alpha1),
            "alpha2": render_complex(self.alpha2),
            "C": render_complex(self.C),
            "t1": render_complex(self.t1),
            "t2": render_complex(self.t2),
            "pole": render_complex(self.pole),
            "residue": render_complex(self.residue),
            "residue_error": abs(self.residue - 1 / self.n),
            "contradiction": self.contradiction,
            "status": self.status,
        }


@dataclass
class VanishingBranch:
    """Whether the auxiliary function φ_n vanishes for a candidate f.

    branch names the constant Riccati solution ("t1" or "t2") that f′/f
    equals, when f is a single exponential on the vanishing branch.
    """

    vanishes: bool
    branch: str | None
    phi_max: float

    def to_dict(self) -> dict:
        return asdict(self)
