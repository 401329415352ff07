from pathlib import Path
from typing import Optional, Sequence

from config.config import settings
from services.bench_services import selector_bench
from utils.command_list import BENCH_CSV_FILE, BENCH_CURVE_FILE, BENCH_SUMMARY_FILE
from utils.common import ensure_directory
from utils.errors import EXIT_OK, EXIT_VALIDATION
from utils.message import BENCH_ARGUMENTS, BENCH_COMPLETED
from utils.metrics_io import write_csv, write_json
from utils.response import create_response, raise_error

BENCH_COLUMNS = (
    "n",
    "trial",
    "brute_kl",
    "brute_size",
    "brute_ms",
    "dynacomm_kl",
    "dynacomm_size",
    "dynacomm_ms",
    "genetic_kl",
    "genetic_size",
    "genetic_ms",
    "random_kl",
    "random_size",
    "random_ms",
    "brute_error",
)
CURVE_COLUMNS = ("n", "trial", "size", "kl")


def selector_bench_controller(
    sizes: Sequence[int], trials: int, seed: int = 0, out: Optional[str] = None
) -> dict:
    """
    Controller for the selector-bench command.

    Writes the per-trial comparison table, the kl_curve rows and a summary of
    dominance rates and mean gaps.
    """
    if trials < 1 or not sizes or min(sizes) < 1:
        raise_error(EXIT_VALIDATION, BENCH_ARGUMENTS, {"sizes": list(sizes), "trials": trials})

    directory = ensure_directory(out or settings.DEFAULT_OUTPUT_DIR)
    result = selector_bench(sizes, trials, seed)

    table = write_csv(Path(directory) / BENCH_CSV_FILE, result["rows"], BENCH_COLUMNS)
    write_csv(Path(directory) / BENCH_CURVE_FILE, result["curves"], CURVE_COLUMNS)
    write_json(Path(directory) / BENCH_SUMMARY_FILE, result["summary"])
    return create_response(EXIT_OK, True, BENCH_COMPLETED.format(path=table), result["summary"])
