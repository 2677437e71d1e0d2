"""Tests for the bundled instances in src/fixtures.py."""

import pytest

from src.equation import verify
from src.errors import ParameterError
from src.fixtures import FIXTURES, get_fixture


def test_four_instances_bundled():
    assert list(FIXTURES) == ["example1", "example2", "example3", "example4"]


def test_every_fixture_carries_a_certified_solution(bundled):
    """Each bundled solution verifies against its own instance."""
    assert verify(bundled.params(), bundled.solution_expsum()).is_solution


def test_to_dict_copies_the_instance(bundled):
    """Mutating to_dict output leaves the fixture alone."""
    d = bundled.to_dict()
    d["instance"]["n"] = 99
    assert bundled.instance["n"] != 99
    assert d["solution"] == bundled.solution


def test_unknown_name_lists_available():
    """The error names the valid fixtures."""
    with pytest.raises(ParameterError) as exc:
        get_fixture("example9")
    assert "example1" in exc.value.message
