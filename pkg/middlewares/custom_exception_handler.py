import logging
from typing import Any, Dict, List

from pydantic import ValidationError

from utils.errors import EXIT_FAILURE, EXIT_VALIDATION, SimulatorError
from utils.message import INTERNAL_SERVER_ERROR, VALIDATION_ERROR
from utils.response import create_response

logger = logging.getLogger(__name__)


def format_validation_errors(exc: ValidationError) -> List[Dict[str, str]]:
    """
    Flatten pydantic errors into {"field", "message"} pairs.

    The field is the dotted path of the offending key, e.g. "training.budget.beta",
    so typos such as an unknown "freqency" key are reported by name.
    """
    formatted_errors = []
    for error in exc.errors():
        field = ".".join(str(part) for part in error["loc"]) or "<root>"
        formatted_errors.append({"field": field, "message": error["msg"]})
    return formatted_errors


def custom_exception_handler(exc: Exception) -> Dict[str, Any]:
    """
    Translate an exception raised by a command into a standard response.

    Parameters:
        exc (Exception): The exception raised while handling the command.

    Returns:
        Dict[str, Any]: Response whose exit_code is 2 for validation problems, the
            error's own code for simulator errors and 1 for anything unexpected.
    """
    # Schema violations in configs or command arguments
    if isinstance(exc, ValidationError):
        errors = format_validation_errors(exc)
        for error in errors:
            logger.error("%s: %s", error["field"], error["message"])
        return create_response(EXIT_VALIDATION, False, VALIDATION_ERROR, {"errors": errors})

    # Known failures carry their own exit code and message
    if isinstance(exc, SimulatorError):
        logger.error(exc.message)
        return create_response(exc.exit_code, False, exc.message, exc.data)

    logger.exception("Unhandled error")
    return create_response(EXIT_FAILURE, False, INTERNAL_SERVER_ERROR, {"error": repr(exc)})
