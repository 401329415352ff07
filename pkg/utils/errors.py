from typing import Any

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_VALIDATION = 2
EXIT_CAPACITY = 3


class SimulatorError(Exception):
    """
    Base class for errors surfaced to the command line.

    Attributes:
        exit_code (int): Process exit code the error maps to.
        message (str): Human readable description.
        data (Any): Optional structured details (e.g. offending field paths).
    """

    exit_code: int = EXIT_FAILURE

    def __init__(self, message: str, data: Any = None, exit_code: int | None = None):
        super().__init__(message)
        self.message = message
        self.data = data
        if exit_code is not None:
            self.exit_code = exit_code


class InputValidationError(SimulatorError, ValueError):
    exit_code = EXIT_VALIDATION


class CapacityError(SimulatorError):
    exit_code = EXIT_CAPACITY


class NumericError(SimulatorError, ArithmeticError):
    exit_code = EXIT_FAILURE


class InfeasibleSelectionError(SimulatorError, AssertionError):
    """Raised when a selector hands back a subset that breaks a budget."""

    exit_code = EXIT_FAILURE
