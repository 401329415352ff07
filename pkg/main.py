import json
import logging
import sys
from typing import Optional, Sequence

from config.config import settings
from middlewares.custom_exception_handler import custom_exception_handler
from routes.cli_routes import build_parser, dispatch
from schemas.response_schema import CommandResponse
from utils.common import json_safe


def configure_logging() -> None:
    """Configure the root logger from settings; log lines go to stderr."""
    logging.basicConfig(
        level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
        format=settings.LOG_FORMAT,
        stream=sys.stderr,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Entry point: parse the command line, run the command and return its exit code.

    Args:
        argv (Sequence[str], optional): Arguments without the program name; sys.argv when omitted.

    Returns:
        int: 0 success, 1 failure, 2 validation error, 3 capacity error.
    """
    configure_logging()
    args = build_parser().parse_args(argv)
    try:
        response = CommandResponse.model_validate(dispatch(args))
    except Exception as exc:
        response = CommandResponse.model_validate(custom_exception_handler(exc))

    # The outcome message is the command's only stdout output
    stream = sys.stdout if response.success else sys.stderr
    print(response.message, file=stream)
    data = response.data
    if not response.success and isinstance(data, dict):
        for error in data.get("errors", []):
            print(f"  {error['field']}: {error['message']}", file=sys.stderr)
        if data.get("worst_scenario"):
            print(f"  worst scenario: {json.dumps(json_safe(data['worst_scenario']))}", file=sys.stderr)
    return response.exit_code


if __name__ == "__main__":
    sys.exit(main())
