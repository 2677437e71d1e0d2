"""Enable execution via `python -m src`."""

from src.main import run

raise SystemExit(run())
