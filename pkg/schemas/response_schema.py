from typing import Any, Optional

from pydantic import BaseModel, ConfigDict

# Column order of metrics.csv
METRICS_COLUMNS = (
    "t",
    "test_loss",
    "test_accuracy",
    "subset_size",
    "subset_kl",
    "round_cost",
    "normalized_cost",
    "cumulative_normalized_cost",
    "wall_ms",
)


class MetricsRecord(BaseModel):
    """
    Schema for one row of metrics.csv / metrics.json.

    Attributes:
    - t: Round index.
    - test_loss / test_accuracy: Held-out evaluation (nan when the round was not evaluated
      or the objective has no accuracy).
    - subset_size / subset_kl: |z| and its KL divergence to the global distribution (nats).
    - round_cost: kappa_g of the round.
    - normalized_cost / cumulative_normalized_cost: kappa_g over the DynamicSGD reference, and its running sum.
    - wall_ms: Round wall time, 0 unless wall time recording is enabled.
    """

    model_config = ConfigDict(extra="forbid")

    t: int
    test_loss: float
    test_accuracy: float
    subset_size: int
    subset_kl: float
    round_cost: float
    normalized_cost: float
    cumulative_normalized_cost: float
    wall_ms: float = 0.0


class CommandResponse(BaseModel):
    """
    Schema for the standard command response.

    Attributes:
    - exit_code: Process exit code of the command.
    - success: A boolean indicating if the command succeeded.
    - message: A message describing the outcome.
    - data: Optional payload (written paths, report values).
    """

    exit_code: int
    success: bool
    message: str
    data: Optional[Any] = None
