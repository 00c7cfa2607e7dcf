# app/api/exception_handling.py
import functools
from typing import Any, Callable, TypeVar

import click

from app.core.errors import SimulationError
from app.core.logging import get_logger

logger = get_logger("exception_handling")

F = TypeVar("F", bound=Callable[..., Any])


def handle_errors(fn: F) -> F:
    """Turn SimulationError into a one-line message and its exit code."""

    @functools.wraps(fn)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return fn(*args, **kwargs)
        except SimulationError as e:
            click.echo(f"error: {e}", err=True)
            raise SystemExit(e.exit_code) from e
        except Exception as e:
            logger.exception("Unhandled error", error=str(e))
            click.echo(f"error: internal failure: {e}", err=True)
            raise SystemExit(1) from e

    return wrapper  # type: ignore[return-value]
