from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from utils.message import THEORY_ETA_RANGE, THEORY_NEEDS_THREE_CLIENTS, THEORY_PLAIN_SGD_ONLY


class QuadraticScenario(BaseModel):
    """
    Three clients learning an unknown mean under the loss (theta - z)^2 / 2.

    Attributes:
    - observations: Exactly three non-empty lists of real observations z_{i,j}.
    - theta0: Initial global parameter.
    - eta: Learning rate in (0, 1].
    - k: Local steps of the high-frequency clients per round (interval of client 3).
    - r: Number of rounds.
    - momentum, weight_decay: Must stay 0; the equivalence holds for plain gradient steps only.
    """

    model_config = ConfigDict(extra="forbid")

    observations: List[List[float]]
    theta0: float = 0.0
    eta: float
    k: int = Field(..., ge=1)
    r: int = Field(..., ge=1)
    momentum: float = 0.0
    weight_decay: float = 0.0

    @field_validator("observations")
    def validate_observations(cls, v):
        if len(v) != 3 or any(len(values) == 0 for values in v):
            raise ValueError(THEORY_NEEDS_THREE_CLIENTS)
        return v

    @field_validator("eta")
    def validate_eta(cls, v):
        if not 0 < v <= 1:
            raise ValueError(THEORY_ETA_RANGE.format(eta=v))
        return v

    @field_validator("momentum", "weight_decay")
    def validate_plain_sgd(cls, v):
        if v != 0:
            raise ValueError(THEORY_PLAIN_SGD_ONLY)
        return v

    @property
    def means(self) -> np.ndarray:
        """Per-client sample means z-bar_i."""
        return np.array([np.mean(values) for values in self.observations])

    @property
    def sizes(self) -> np.ndarray:
        return np.array([len(values) for values in self.observations], dtype=np.float64)

    @property
    def weights(self) -> np.ndarray:
        """Aggregation weights lambda_i = n_i / n."""
        return self.sizes / self.sizes.sum()

    @property
    def theta_star(self) -> float:
        """Global minimiser, the data-weighted mean of the client means."""
        return float(np.dot(self.weights, self.means))
