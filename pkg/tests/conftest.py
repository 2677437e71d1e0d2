"""Shared pytest fixtures for bundled instances and env isolation."""

import json
import math
import os
from pathlib import Path

import numpy as np
import pytest

from src.config import Settings
from src.expsum import ExpSum
from src.fixtures import get_fixture

PI_I = math.pi * 1j


@pytest.fixture
def fixtures_dir():
    """Return the path to the tests/fixtures/ directory."""
    return Path(__file__).parent / "fixtures"


@pytest.fixture
def example1_instance(fixtures_dir):
    """Load the Example 1 instance in the JSON instance schema."""
    with open(fixtures_dir / "example1_instance.json") as f:
        return json.load(f)


@pytest.fixture(params=["example1", "example2", "example3", "example4"])
def bundled(request):
    """Each bundled fixture in turn."""
    return get_fixture(request.param)


@pytest.fixture
def f4():
    """The many-zeros solution of the n=2 instance."""
    return get_fixture("example4").solution_expsum()


@pytest.fixture
def two_cos():
    """e^{πiz} + e^{−πiz} = 2cos(πz)."""
    return ExpSum.exponential(1, PI_I) + ExpSum.exponential(1, -PI_I)


@pytest.fixture
def rng():
    """Seeded generator so random draws are reproducible."""
    return np.random.default_rng(20261019)


@pytest.fixture
def default_settings():
    return Settings()


@pytest.fixture
def clean_env(monkeypatch):
    """Clear all EXPDIFF_* env vars and prevent .env reload."""
    for key in list(os.environ.keys()):
        if key.startswith("EXPDIFF_"):
            monkeypatch.delenv(key, raising=False)

    # Prevent load_dotenv() from re-reading .env file during tests
    monkeypatch.setattr("src.config.load_dotenv", lambda *a, **kw: None)
