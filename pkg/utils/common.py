import json
import math
from pathlib import Path
from typing import Any

from utils.errors import InputValidationError
from utils.message import CONFIG_NOT_FOUND


def read_json_file(path) -> Any:
    """
    Read a JSON document.

    Args:
        path: File location.

    Returns:
        Any: The decoded document.

    Raises:
        InputValidationError: If the file does not exist or is not valid JSON.
    """
    path = Path(path)
    if not path.is_file():
        raise InputValidationError(CONFIG_NOT_FOUND.format(path=path))
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InputValidationError(
            f"{path} is not valid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno}).",
            data=[{"field": "<root>", "message": exc.msg}],
        ) from exc


def ensure_directory(path) -> Path:
    """Create a directory (and parents) if needed and return it as a Path."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


def format_number(value: Any) -> str:
    """
    Locale-independent text for a CSV cell.

    Floats use repr (shortest round-tripping form, "inf"/"nan" for non-finite values);
    everything else uses str.
    """
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    return str(value)


def json_safe(value: Any) -> Any:
    """Replace non-finite floats by their text so documents stay strict JSON."""
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    if isinstance(value, dict):
        return {key: json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(item) for item in value]
    return value
