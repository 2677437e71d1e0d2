"""Command-line entry point.

Provides run() which parses arguments, loads settings, dispatches to
CommandDispatcher and formats the result as JSON, text (rich tables) or CSV.
stdout carries only command output; logs and diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any

from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from src.commands import EXIT_INPUT_ERROR, CommandDispatcher, CommandResult
from src.config import (
    OUTPUT_FORMATS,
    Settings,
    load_settings,
    validate_and_display,
    validate_settings,
)

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("r", "m", "n", "N", "T")


def _add_instance_args(parser: argparse.ArgumentParser) -> None:
    source = parser.add_argument_group("instance")
    source.add_argument("--instance", metavar="FILE", help="JSON instance file")
    source.add_argument("--fixture", metavar="NAME", help="bundled instance (see `fixtures`)")
    source.add_argument("--n", type=int, help="power on f")
    source.add_argument("--q", help="polynomial q(z)")
    source.add_argument("--p1", help="coefficient p1")
    source.add_argument("--p2", help="coefficient p2")
    source.add_argument("--alpha1", help="frequency alpha1")
    source.add_argument("--alpha2", help="frequency alpha2")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m src",
        description="Exact solutions of f^n + q(z)Δf = p1·e^{α1 z} + p2·e^{α2 z}.",
    )
    parser.add_argument("--tol-freq", type=float, help="frequency merge tolerance")
    parser.add_argument("--tol-coeff", type=float, help="coefficient zero threshold")
    parser.add_argument("--tol-rel", type=float, help="classifier gate tolerance")
    parser.add_argument("--format", choices=OUTPUT_FORMATS, help="output format")
    parser.add_argument("--out", metavar="FILE", help="write output to FILE instead of stdout")
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    classify = sub.add_parser("classify", help="enumerate and certify exact solutions")
    _add_instance_args(classify)

    verify = sub.add_parser("verify", help="certify a candidate solution")
    _add_instance_args(verify)
    verify.add_argument("--f", help="candidate f (defaults to the fixture's solution)")

    char = sub.add_parser("char", help="Nevanlinna characteristic sweep")
    char.add_argument("--f", help="entire function f")
    char.add_argument("--fixture", metavar="NAME", help="use a fixture's solution as f")
    char.add_argument("--r-min", type=float, default=1.0)
    char.add_argument("--r-max", type=float, default=100.0)
    char.add_argument("--points", type=int, default=16)
    char.add_argument("--grid", type=int, help="counting grid size")
    char.add_argument("--simple-radius", type=float, help="also check zero simplicity up to R")

    riccati = sub.add_parser("riccati", help="Riccati branch residue")
    riccati.add_argument("--n", type=int)
    riccati.add_argument("--alpha1")
    riccati.add_argument("--alpha2")
    riccati.add_argument("--C", default="0", help="integration constant")
    riccati.add_argument("--pole", type=int, default=0, help="pole index k")
    riccati.add_argument("--f", help="check whether f lies on the vanishing branch")
    riccati.add_argument(
        "--fixture", metavar="NAME", help="take n, alpha1, alpha2, f from a fixture"
    )

    fixtures = sub.add_parser("fixtures", help="list bundled instances")
    fixtures.add_argument("--name", help="show one instance with its solution")

    sub.add_parser("config", help="validate settings")
    return parser


def _configure_logging(level: str) -> None:
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


# ----------------------------------------------------------------------
# Formatting
# ----------------------------------------------------------------------


def format_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def format_csv(rows: list[dict[str, Any]], columns: tuple[str, ...] | None = None) -> str:
    buf = io.StringIO()
    if columns is None:
        columns = tuple(rows[0]) if rows else ()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: row.get(k) for k in columns})
    return buf.getvalue()


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, dict | list):
        return json.dumps(value, sort_keys=True, ensure_ascii=False)
    return str(value)


def format_text(payload: Any) -> str:
    """Render a payload as rich tables: list of records or key/value pairs."""
    console = Console(file=io.StringIO(), width=120, color_system=None)
    if isinstance(payload, list):
        columns = list(payload[0]) if payload else []
        table = Table(*columns)
        for row in payload:
            table.add_row(*(_cell(row.get(c)) for c in columns))
        console.print(table)
    else:
        table = Table("key", "value")
        for key in sorted(payload):
            value = payload[key]
            if key in ("solutions", "rows") and isinstance(value, list):
                continue
            table.add_row(key, _cell(value))
        console.print(table)
        for key in ("solutions", "rows"):
            records = payload.get(key)
            if isinstance(records, list) and records:
                sub = Table(*records[0], title=key)
                for record in records:
                    sub.add_row(*(_cell(record.get(c)) for c in records[0]))
                console.print(sub)
    return console.file.getvalue()


def render_result(command: str, result: CommandResult, fmt: str) -> str:
    if fmt == "csv":
        if command == "char":
            return format_csv(result.rows or [], CSV_COLUMNS)
        if result.rows is not None:
            return format_csv(result.rows)
        logger.warning("csv output is only available for char and fixtures; using json")
        return format_json(result.payload)
    if fmt == "text":
        return format_text(result.payload)
    return format_json(result.payload)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _report_error(error: dict[str, Any], caret: str = "") -> None:
    sys.stderr.write(format_json({"error": error}))
    if caret:
        sys.stderr.write(caret + "\n")


# ----------------------------------------------------------------------
# Entry point
# ----------------------------------------------------------------------


def _settings_from(args: argparse.Namespace) -> Settings:
    return load_settings().with_overrides(
        tol_freq=args.tol_freq,
        tol_coeff=args.tol_coeff,
        tol_rel=args.tol_rel,
        output_format=args.format,
    )


def run(argv: list[str] | None = None) -> int:
    """Parse argv, run one command and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    settings = _settings_from(args)
    _configure_logging("DEBUG" if args.verbose else settings.log_level)

    _passed, failed = validate_settings(settings)
    if failed and args.command != "config":
        _report_error({"code": "config_error", "message": "; ".join(failed)})
        return EXIT_INPUT_ERROR

    if args.command == "config" and settings.output_format == "text":
        return validate_and_display(settings, Console(file=sys.stdout))

    arguments = {k: v for k, v in vars(args).items() if k != "command"}
    dispatcher = CommandDispatcher(settings)
    try:
        result = dispatcher.dispatch(args.command, arguments)
        if result.error is not None:
            _report_error(result.error, result.caret)
            return result.exit_code
        _emit(render_result(args.command, result, settings.output_format), args.out)
        if settings.output_format == "csv" and result.extra:
            sys.stderr.write(format_json(result.extra))
    except Exception:
        logger.exception("unexpected failure in %s", args.command)
        _report_error({"code": "internal", "message": "unexpected internal error"})
        return EXIT_INPUT_ERROR
    return result.exit_code
