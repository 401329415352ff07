from typing import Any, Dict

from utils.errors import SimulatorError


def create_response(
    exit_code: int, success: bool, message: str, data: Any = None
) -> Dict[str, Any]:
    """
    Create a standardized command response structure.

    Args:
        exit_code (int): The process exit code for the command.
        success (bool): Indicates whether the command was successful or not.
        message (str): A message providing additional context about the outcome.
        data (Any, optional): The data to be included in the response. Defaults to None.

    Returns:
        Dict[str, Any]: A dictionary representing the structured command response.
    """
    return {
        "exit_code": exit_code,  # Process exit code (0 success, 1 failure, 2 validation, 3 capacity)
        "success": success,      # Boolean indicating the success of the command
        "message": message,      # A descriptive message about the outcome
        "data": data,            # Optional payload (paths written, report values, ...)
    }


def raise_error(exit_code: int, message: str, data: Any = None) -> None:
    """
    Raise a SimulatorError with a standardized error structure.

    Args:
        exit_code (int): The exit code the command should terminate with.
        message (str): A message providing additional context about the error.
        data (Any, optional): Optional data related to the error (e.g. validation errors).

    Raises:
        SimulatorError: Caught by the command line exception handler and turned into an exit code.
    """
    raise SimulatorError(message, data=data, exit_code=exit_code)
