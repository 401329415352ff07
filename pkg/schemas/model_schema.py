from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from utils.message import COSINE_NEEDS_HORIZON, OBJECTIVE_MLP_HIDDEN, OBJECTIVE_QUADRATIC_DIM


class Objective(BaseModel):
    """
    Schema for the local objective every client optimises.

    Attributes:
    - kind: quadratic_mean (learn a scalar mean), softmax (multinomial logistic
      regression) or mlp (one tanh hidden layer).
    - num_classes: Label space size; inferred from the dataset when omitted.
    - feature_dim: Input width; inferred from the dataset when omitted.
    - hidden: Hidden width for mlp.
    """

    model_config = ConfigDict(extra="forbid")

    kind: Literal["quadratic_mean", "softmax", "mlp"] = "softmax"
    num_classes: Optional[int] = Field(None, ge=1)
    feature_dim: Optional[int] = Field(None, ge=1)
    hidden: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def kind_constraints(self):
        if self.kind == "quadratic_mean" and self.feature_dim not in (None, 1):
            raise ValueError(OBJECTIVE_QUADRATIC_DIM)
        if self.kind == "mlp" and self.hidden is None:
            raise ValueError(OBJECTIVE_MLP_HIDDEN)
        return self


class OptimizerConfig(BaseModel):
    """
    Schema for the local SGD optimiser.

    Attributes:
    - learning_rate: Base step size eta (0 freezes parameters).
    - momentum: Heavy-ball coefficient in [0, 1).
    - nesterov: Apply the Nesterov look-ahead when momentum > 0.
    - weight_decay: L2 coefficient added to the gradient.
    - schedule: constant or cosine annealing over total_steps.
    - total_steps: Number of steps the cosine schedule spans; the engine fills T * L when omitted.
    """

    model_config = ConfigDict(extra="forbid")

    learning_rate: float = Field(0.01, ge=0)
    momentum: float = Field(0.9, ge=0, lt=1)
    nesterov: bool = False
    weight_decay: float = Field(0.0, ge=0)
    schedule: Literal["constant", "cosine"] = "cosine"
    total_steps: Optional[int] = None

    @model_validator(mode="after")
    def cosine_horizon_positive(self):
        if self.schedule == "cosine" and self.total_steps is not None and self.total_steps <= 0:
            raise ValueError(COSINE_NEEDS_HORIZON)
        return self


class ModelConfig(BaseModel):
    """Model block of an experiment: objective plus optimiser."""

    model_config = ConfigDict(extra="forbid")

    objective: Objective = Field(default_factory=Objective)
    optimizer: OptimizerConfig = Field(default_factory=OptimizerConfig)
