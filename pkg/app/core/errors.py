# app/core/errors.py
from typing import Optional


class SimulationError(Exception):
    """Base error for everything the simulator raises on purpose.

    ``exit_code`` is what the CLI returns when the error escapes a command.
    """

    exit_code: int = 1

    def __init__(self, message: str, exit_code: Optional[int] = None) -> None:
        super().__init__(message)
        self.message = message
        if exit_code is not None:
            self.exit_code = exit_code

    def __str__(self) -> str:
        return self.message


class InvalidCodeError(SimulationError):
    pass


class DimensionMismatchError(SimulationError):
    pass


class InvalidModelError(SimulationError):
    pass


class EnumerationLimitError(SimulationError):
    pass


class ConfigError(SimulationError):
    exit_code = 2


class ResultsIOError(SimulationError):
    exit_code = 3

    def __init__(self, message: str, path: str) -> None:
        super().__init__(f"{message}: {path}")
        self.path = path
