"""Command dispatch for the CLI.

Provides CommandDispatcher which maps subcommand names to handler methods,
resolves equation instances from files, bundled fixtures or inline flags,
and converts library errors into structured CommandResult values.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from src.classifier import classify
from src.config import Settings, validate_settings
from src.equation import INSTANCE_FIELDS, EquationParams, verify
from src.errors import ExpDiffError, ParameterError, ParseError
from src.fixtures import FIXTURES, get_fixture
from src.nevanlinna import characteristic_profile, simple_zero_report
from src.parser import parse_complex, parse_expsum, render
from src.riccati import RiccatiModel, riccati_report, vanishing_branch

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT_ERROR = 2

# Progress messages logged while a command runs
_STATUS_MESSAGES: dict[str, str] = {
    "classify": "Classifying instance...",
    "verify": "Verifying candidate...",
    "char": "Estimating Nevanlinna characteristic...",
    "riccati": "Computing Riccati residue...",
    "fixtures": "Listing fixtures...",
    "config": "Validating settings...",
}

_DEFAULT_STATUS = "Running command..."


@dataclass
class CommandResult:
    """Outcome of one command.

    payload is the JSON document for stdout; rows, when present, is the
    tabular form used for CSV output; error is the structured diagnostic
    written to stderr.
    """

    exit_code: int
    payload: Any = None
    rows: list[dict[str, Any]] | None = None
    error: dict[str, Any] | None = None
    caret: str = ""
    extra: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def failure(cls, exc: ExpDiffError) -> CommandResult:
        caret = exc.caret() if isinstance(exc, ParseError) else ""
        return cls(EXIT_INPUT_ERROR, error=exc.to_dict(), caret=caret)


class CommandDispatcher:
    """Routes subcommands to handlers.

    Each command name maps 1:1 to a handler method taking the parsed
    arguments as a dict. Unknown names and library errors come back as a
    CommandResult with exit code 2 and a structured error.
    """

    def __init__(self, settings: Settings):
        self._settings = settings
        self._tol = settings.tolerances()
        self._dispatch_map: dict[str, Callable[[dict], CommandResult]] = {
            "classify": self._classify,
            "verify": self._verify,
            "char": self._char,
            "riccati": self._riccati,
            "fixtures": self._fixtures,
            "config": self._config,
        }

    @property
    def commands(self) -> list[str]:
        return list(self._dispatch_map)

    def dispatch(self, command: str, arguments: dict) -> CommandResult:
        """Run a command. Library errors become exit code 2 results."""
        handler = self._dispatch_map.get(command)
        if handler is None:
            return CommandResult(
                EXIT_INPUT_ERROR,
                error={"code": "unknown_command", "message": f"Unknown command: {command}"},
            )
        logger.info(self.get_status_message(command))
        try:
            return handler(arguments)
        except ExpDiffError as exc:
            logger.debug("%s failed: %s", command, exc.message)
            return CommandResult.failure(exc)

    def get_status_message(self, command: str) -> str:
        return _STATUS_MESSAGES.get(command, _DEFAULT_STATUS)

    # ------------------------------------------------------------------
    # Private: input resolution
    # ------------------------------------------------------------------

    def _instance_data(self, args: dict) -> dict[str, Any]:
        if args.get("fixture"):
            return dict(get_fixture(args["fixture"]).instance)
        if args.get("instance"):
            path = Path(args["instance"])
            try:
                data = json.loads(path.read_text(encoding="utf-8"))
            except OSError as exc:
                raise ParameterError([f"cannot read instance file {path}: {exc}"]) from exc
            except json.JSONDecodeError as exc:
                raise ParameterError([f"instance file {path} is not valid JSON: {exc}"]) from exc
            if not isinstance(data, dict):
                raise ParameterError([f"instance file {path} must hold a JSON object"])
            return data
        return {k: args[k] for k in INSTANCE_FIELDS if args.get(k) is not None}

    def _params(self, args: dict) -> EquationParams:
        return EquationParams.from_dict(self._instance_data(args), self._tol)

    def _function_text(self, args: dict) -> str:
        """The f expression, defaulting to the fixture's published solution."""
        if args.get("f"):
            return args["f"]
        if args.get("fixture"):
            return get_fixture(args["fixture"]).solution
        raise ParameterError(["an f expression is required (--f or --fixture)"])

    # ------------------------------------------------------------------
    # Private: command handlers
    # ------------------------------------------------------------------

    def _classify(self, args: dict) -> CommandResult:
        params = self._params(args)
        result = classify(params, self._settings.tol_rel, self._settings.verify_tol)
        return CommandResult(EXIT_OK, result.to_dict())

    def _verify(self, args: dict) -> CommandResult:
        params = self._params(args)
        f = parse_expsum(self._function_text(args), self._tol)
        report = verify(params, f, self._settings.verify_tol)
        payload = {"f": render(f), **report.to_dict()}
        return CommandResult(EXIT_OK if report.is_solution else EXIT_NEGATIVE, payload)

    def _char(self, args: dict) -> CommandResult:
        f = parse_expsum(self._function_text(args), self._tol)
        profile = characteristic_profile(
            f,
            float(_arg(args, "r_min", 1.0)),
            float(_arg(args, "r_max", 100.0)),
            int(_arg(args, "points", 16)),
            int(_arg(args, "grid", self._settings.counting_grid)),
            min_nodes=self._settings.quad_min_nodes,
            max_nodes=self._settings.quad_max_nodes,
        )
        payload = {"f": render(f), **profile.to_dict()}
        if args.get("simple_radius"):
            report = simple_zero_report(
                f, float(args["simple_radius"]), max_nodes=self._settings.quad_max_nodes
            )
            payload["simple_zeros"] = report.to_dict()
        return CommandResult(EXIT_OK, payload, rows=profile.rows(), extra=profile.summary())

    def _riccati(self, args: dict) -> CommandResult:
        if args.get("fixture"):
            params = self._params(args)
            n, alpha1, alpha2 = params.n, params.alpha1, params.alpha2
        else:
            missing = [k for k in ("n", "alpha1", "alpha2") if args.get(k) is None]
            if missing:
                raise ParameterError([f"missing --{k}" for k in missing])
            n = int(args["n"])
            alpha1, alpha2 = parse_complex(args["alpha1"]), parse_complex(args["alpha2"])
        model = RiccatiModel(n, alpha1, alpha2, parse_complex(_arg(args, "C", "0")))
        payload = riccati_report(
            model, int(_arg(args, "pole", 0)), nodes=self._settings.residue_nodes
        ).to_dict()
        if args.get("f") or args.get("fixture"):
            f = parse_expsum(self._function_text(args), self._tol)
            branch = vanishing_branch(f, n, alpha1, alpha2, self._settings.verify_tol)
            payload["f"] = render(f)
            payload["vanishing_branch"] = branch.to_dict()
        return CommandResult(EXIT_OK, payload)

    def _fixtures(self, args: dict) -> CommandResult:
        name = args.get("name")
        if name:
            return CommandResult(EXIT_OK, get_fixture(name).to_dict())
        listing = [{"name": f.name, "description": f.description} for f in FIXTURES.values()]
        return CommandResult(EXIT_OK, listing, rows=listing)

    def _config(self, args: dict) -> CommandResult:
        passed, failed = validate_settings(self._settings)
        payload = {"passed": passed, "failed": failed}
        return CommandResult(EXIT_INPUT_ERROR if failed else EXIT_OK, payload)


def _arg(args: dict, key: str, default: Any) -> Any:
    """args[key], or default when the flag was absent or left as None."""
    value = args.get(key)
    return default if value is None else value
