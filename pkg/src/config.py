"""Configuration module with layered validation.

Provides the Settings dataclass, environment variable loading (optional
EXPDIFF_* overrides on top of built-in defaults) and a rich validation table
exposed through the ``config`` subcommand.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, fields, replace

from dotenv import load_dotenv
from rich.console import Console
from rich.table import Table

from src.expsum import Tolerances

OUTPUT_FORMATS = ("json", "text", "csv")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass
class Settings:
    """All configuration loaded from environment variables."""

    # Algebra / classifier tolerances
    tol_freq: float = 1e-9
    tol_coeff: float = 1e-12
    tol_rel: float = 1e-8
    verify_tol: float = 1e-9

    # Output
    output_format: str = "json"
    log_level: str = "WARNING"

    # Quadrature tuning
    quad_min_nodes: int = 256
    quad_max_nodes: int = 2**20
    counting_grid: int = 64
    residue_nodes: int = 4096

    def tolerances(self) -> Tolerances:
        """Tolerances used by the algebra and the parser."""
        return Tolerances(freq=self.tol_freq, coeff=self.tol_coeff)

    def with_overrides(self, **overrides) -> Settings:
        """Copy with every non-None override applied (CLI flags)."""
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise TypeError(f"unknown settings: {', '.join(sorted(unknown))}")
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


# Optional vars -- defaults apply when unset
OPTIONAL_VARS: dict[str, tuple[str, str]] = {
    "EXPDIFF_TOL_FREQ": ("tol_freq", "Frequency merge tolerance (default: 1e-9)"),
    "EXPDIFF_TOL_COEFF": ("tol_coeff", "Coefficient zero threshold (default: 1e-12)"),
    "EXPDIFF_TOL_REL": ("tol_rel", "Classifier gate tolerance (default: 1e-8)"),
    "EXPDIFF_VERIFY_TOL": ("verify_tol", "Verification tolerance (default: 1e-9)"),
    "EXPDIFF_FORMAT": ("output_format", "Output format json|text|csv (default: json)"),
    "EXPDIFF_LOG_LEVEL": ("log_level", "Log level (default: WARNING)"),
    "EXPDIFF_QUAD_MIN_NODES": ("quad_min_nodes", "Initial quadrature nodes (default: 256)"),
    "EXPDIFF_QUAD_MAX_NODES": ("quad_max_nodes", "Quadrature node cap (default: 1048576)"),
    "EXPDIFF_COUNTING_GRID": ("counting_grid", "Radii per counting grid (default: 64)"),
    "EXPDIFF_RESIDUE_NODES": ("residue_nodes", "Initial residue contour nodes (default: 4096)"),
}

_FLOAT_FIELDS = ("tol_freq", "tol_coeff", "tol_rel", "verify_tol")
_INT_FIELDS = ("quad_min_nodes", "quad_max_nodes", "counting_grid", "residue_nodes")


def _parse_env(name: str, raw: str) -> float | int | str:
    """Convert a raw env value for the named field; unparsable numbers become NaN."""
    if name == "output_format":
        return raw.lower()
    if name == "log_level":
        return raw.upper()
    try:
        return int(raw) if name in _INT_FIELDS else float(raw)
    except ValueError:
        return math.nan


def load_settings() -> Settings:
    """Load and return settings from .env file and the environment."""
    load_dotenv()
    values = {}
    for var, (name, _) in OPTIONAL_VARS.items():
        raw = os.getenv(var, "")
        if raw:
            values[name] = _parse_env(name, raw)
    return Settings(**values)


def validate_settings(settings: Settings) -> tuple[list[str], list[str]]:
    """Check every setting. Returns (passed, failed) lists.

    Shows ALL problems at once (not fail-fast) so they can be fixed in one
    pass.
    """
    passed: list[str] = []
    failed: list[str] = []
    for name in _FLOAT_FIELDS:
        value = getattr(settings, name)
        if isinstance(value, int | float) and math.isfinite(value) and value > 0:
            passed.append(name)
        else:
            failed.append(f"{name} (must be a finite positive number, got {value!r})")
    for name in _INT_FIELDS:
        value = getattr(settings, name)
        minimum = 2 if name == "counting_grid" else 1
        if isinstance(value, int) and not isinstance(value, bool) and value >= minimum:
            passed.append(name)
        else:
            failed.append(f"{name} (must be an integer >= {minimum}, got {value!r})")
    if "quad_max_nodes" in passed and settings.quad_max_nodes < settings.quad_min_nodes:
        passed.remove("quad_max_nodes")
        failed.append(
            f"quad_max_nodes (must be >= quad_min_nodes={settings.quad_min_nodes}, "
            f"got {settings.quad_max_nodes!r})"
        )
    if settings.output_format in OUTPUT_FORMATS:
        passed.append("output_format")
    else:
        failed.append(
            f"output_format (must be one of {'|'.join(OUTPUT_FORMATS)}, "
            f"got {settings.output_format!r})"
        )
    if settings.log_level in LOG_LEVELS:
        passed.append("log_level")
    else:
        failed.append(f"log_level (must be one of {', '.join(LOG_LEVELS)})")
    return passed, failed


def validate_and_display(settings: Settings | None = None, console: Console | None = None) -> int:
    """Validate settings and display results as a rich table.

    Returns the exit code: 0 when every check passes, 2 otherwise.
    """
    settings = settings or load_settings()
    console = console or Console()
    table = Table(title="Configuration Validation")
    table.add_column("Check", style="bold")
    table.add_column("Status")
    table.add_column("Details")

    passed, failed = validate_settings(settings)

    for name in passed:
        table.add_row(name, "[green]PASS[/green]", repr(getattr(settings, name)))

    for desc in failed:
        table.add_row(desc.split(" (")[0], "[red]FAIL[/red]", desc)

    console.print(table)

    if failed:
        console.print(f"\n[red]Validation failed:[/red] {len(failed)} setting(s) invalid.")
        return 2

    console.print("\n[green]All checks passed.[/green]")
    return 0
