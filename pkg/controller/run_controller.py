import logging
from pathlib import Path
from typing import Optional

from config.config import settings
from services.engine_services import run_training
from services.experiment_services import metrics_records, parse_config, prepare_experiment
from utils.command_list import METRICS_CSV_FILE, METRICS_JSON_FILE, RESOLVED_CONFIG_FILE
from utils.common import ensure_directory
from utils.errors import EXIT_OK
from utils.message import RUN_COMPLETED
from utils.metrics_io import write_json, write_metrics_csv
from utils.response import create_response

logger = logging.getLogger(__name__)


def run_controller(
    config_path, seed: Optional[int] = None, out: Optional[str] = None, threads: Optional[int] = None
) -> dict:
    """
    Controller for the run command.

    This command performs the following steps:
    1. Parses and validates the experiment config (applying the seed override).
    2. Builds the dataset, the held-out split and the client partition.
    3. Runs training and writes metrics.csv / metrics.json plus resolved_config.json.

    Args:
        config_path: JSON experiment config.
        seed (int, optional): Master seed override.
        out (str, optional): Output directory override.
        threads (int, optional): Client worker threads (0 = auto); settings default when omitted.

    Returns:
        dict: Standard command response with the written paths.
    """
    config = parse_config(config_path, seed)
    clients, _, test = prepare_experiment(config)

    # Resolve where results go, echoing the choice into the resolved config
    directory = ensure_directory(out or config.output.directory or settings.DEFAULT_OUTPUT_DIR)
    config.output.directory = str(directory)

    state = run_training(
        config.training,
        config.model,
        clients,
        test,
        threads=settings.DEFAULT_THREADS if threads is None else threads,
        record_wall_time=config.output.record_wall_time,
    )

    records = metrics_records(state)
    written = []
    if "csv" in config.output.formats:
        written.append(str(write_metrics_csv(Path(directory) / METRICS_CSV_FILE, records)))
    if "json" in config.output.formats:
        written.append(
            str(write_json(Path(directory) / METRICS_JSON_FILE, [record.model_dump() for record in records]))
        )
    written.append(str(write_json(Path(directory) / RESOLVED_CONFIG_FILE, config.model_dump(mode="json"))))

    return create_response(
        EXIT_OK,
        True,
        RUN_COMPLETED.format(rounds=len(records), directory=directory),
        {"files": written, "rounds": len(records), "total_updates": state.total_updates},
    )
