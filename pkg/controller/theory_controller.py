from pathlib import Path
from typing import Optional, Sequence

from services.theory_services import DEFAULT_ETAS, DEFAULT_KS, DEFAULT_RS, DEFAULT_SCENARIOS, run_theory_grid
from utils.command_list import THEORY_REPORT_FILE
from utils.common import ensure_directory
from utils.errors import EXIT_FAILURE, EXIT_OK
from utils.message import THEORY_FAILED, THEORY_PASSED, THEORY_REPORT
from utils.metrics_io import write_json
from utils.response import create_response


def theory_controller(
    seed: int = 0,
    out: Optional[str] = None,
    etas: Optional[Sequence[float]] = None,
    ks: Optional[Sequence[int]] = None,
    rs: Optional[Sequence[int]] = None,
    scenarios: int = DEFAULT_SCENARIOS,
) -> dict:
    """
    Controller for the theory command: run the quadratic equivalence grid.

    Args:
        seed (int): Scenario generator seed.
        out (str, optional): Directory for theory_report.json.
        etas, ks, rs: Grid overrides.
        scenarios (int): Random scenarios per grid point.

    Returns:
        dict: Response with exit code 0 when every deviation is within tolerance, 1 otherwise
            (the worst scenario is included in the data).
    """
    report = run_theory_grid(
        seed=seed,
        etas=etas or DEFAULT_ETAS,
        ks=ks or DEFAULT_KS,
        rs=rs or DEFAULT_RS,
        scenarios=scenarios,
    )
    if out:
        write_json(ensure_directory(out) / Path(THEORY_REPORT_FILE), report)

    passed = report["passed"]
    message = THEORY_REPORT.format(
        verdict=THEORY_PASSED if passed else THEORY_FAILED,
        count=report["scenarios"],
        max_delta=report["max_delta"],
        closed=report["max_closed_form_delta"],
        fedsgd=report["max_fedsgd_delta"],
    )
    return create_response(EXIT_OK if passed else EXIT_FAILURE, passed, message, report)
