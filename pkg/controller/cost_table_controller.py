from pathlib import Path
from typing import Optional

from config.config import settings
from services.bench_services import cost_table
from utils.command_list import COST_TABLE_FILE
from utils.common import ensure_directory
from utils.errors import EXIT_OK, EXIT_VALIDATION
from utils.message import COST_TABLE_ARGUMENTS, COST_TABLE_COMPLETED
from utils.metrics_io import write_csv
from utils.response import create_response, raise_error

COST_TABLE_COLUMNS = ("configuration", "high_clients", "normalized_cost")


def cost_table_controller(
    L: int = 250, actives: int = 10, high_fraction: float = 0.3, out: Optional[str] = None
) -> dict:
    """Controller for the cost-table command (pure accounting, no training)."""
    if L < 1 or actives < 1 or not 0 <= high_fraction <= 1:
        raise_error(EXIT_VALIDATION, COST_TABLE_ARGUMENTS, {"L": L, "actives": actives, "high_fraction": high_fraction})

    rows = cost_table(L, actives, high_fraction)
    directory = ensure_directory(out or settings.DEFAULT_OUTPUT_DIR)
    path = write_csv(Path(directory) / COST_TABLE_FILE, rows, COST_TABLE_COLUMNS)
    return create_response(
        EXIT_OK, True, COST_TABLE_COMPLETED.format(path=path), {row["configuration"]: row["normalized_cost"] for row in rows}
    )
