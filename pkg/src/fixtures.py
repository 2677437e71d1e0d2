"""Bundled equation instances with their known solutions.

Selectable by name from every instance command (``--fixture example1``) and
used as the acceptance corpus by the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

from src.equation import EquationParams
from src.errors import ParameterError
from src.expsum import DEFAULT_TOLERANCES, ExpSum, Tolerances
from src.parser import parse_expsum


@dataclass(frozen=True)
class Fixture:
    name: str
    description: str
    instance: dict[str, int | str]
    solution: str

    def params(self, tol: Tolerances = DEFAULT_TOLERANCES) -> EquationParams:
        return EquationParams.from_dict(self.instance, tol)

    def solution_expsum(self, tol: Tolerances = DEFAULT_TOLERANCES) -> ExpSum:
        return parse_expsum(self.solution, tol)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "instance": dict(self.instance),
            "solution": self.solution,
        }


FIXTURES: dict[str, Fixture] = {
    f.name: f
    for f in (
        Fixture(
            name="example1",
            description="n=3 binomial solution: f^3 + 1.5*Δf = e^{3πiz} + e^{-3πiz}",
            instance={
                "n": 3,
                "q": "1.5",
                "p1": "1",
                "p2": "1",
                "alpha1": "3*pi*i",
                "alpha2": "-3*pi*i",
            },
            solution="exp(pi*i*z) + exp(-pi*i*z)",
        ),
        Fixture(
            name="example2",
            description="n=3 monomial solution with α1 = 3α2",
            instance={
                "n": 3,
                "q": "-0.5",
                "p1": "1",
                "p2": "1",
                "alpha1": "3*pi*i",
                "alpha2": "pi*i",
            },
            solution="exp(pi*i*z)",
        ),
        Fixture(
            name="example3",
            description="n=3 monomial solution with α2 = 3α1",
            instance={
                "n": 3,
                "q": "-0.5",
                "p1": "1",
                "p2": "1",
                "alpha1": "3*pi*i",
                "alpha2": "9*pi*i",
            },
            solution="exp(3*pi*i*z)",
        ),
        Fixture(
            name="example4",
            description="n=2 solution with many zeros: N(r,1/f) = 2r(1+o(1))",
            instance={
                "n": 2,
                "q": "-2",
                "p1": "2",
                "p2": "2",
                "alpha1": "2*pi*i",
                "alpha2": "-2*pi*i",
            },
            solution="-2 - sqrt(2)*exp(pi*i*z) + sqrt(2)*exp(-pi*i*z)",
        ),
    )
}


def get_fixture(name: str) -> Fixture:
    """Look up a bundled instance.

    Raises:
        ParameterError: unknown name; the message lists the available ones.
    """
    try:
        return FIXTURES[name]
    except KeyError:
        raise ParameterError(
            [f"unknown fixture {name!r}; available: {', '.join(FIXTURES)}"]
        ) from None
