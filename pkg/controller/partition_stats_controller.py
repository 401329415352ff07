from pathlib import Path
from typing import Optional

from config.config import settings
from services.datastats_services import joint_distribution, partition_stats
from services.experiment_services import parse_config, prepare_experiment
from utils.command_list import PARTITION_STATS_FILE
from utils.common import ensure_directory
from utils.errors import EXIT_OK
from utils.message import PARTITION_STATS_COMPLETED
from utils.metrics_io import write_csv
from utils.response import create_response

PARTITION_STATS_COLUMNS = ("client_id", "count", "kl_to_global", "histogram")


def partition_stats_controller(config_path, seed: Optional[int] = None, out: Optional[str] = None) -> dict:
    """
    Controller for the partition-stats command: dump per-client label histograms and
    their KL divergence to the global training distribution.
    """
    config = parse_config(config_path, seed)
    clients, _, _ = prepare_experiment(config)
    global_dist = joint_distribution([client.label_dist for client in clients])
    rows = partition_stats(clients, global_dist)

    directory = ensure_directory(out or config.output.directory or settings.DEFAULT_OUTPUT_DIR)
    path = write_csv(Path(directory) / PARTITION_STATS_FILE, rows, PARTITION_STATS_COLUMNS)
    return create_response(EXIT_OK, True, PARTITION_STATS_COMPLETED.format(path=path), {"clients": len(rows)})
