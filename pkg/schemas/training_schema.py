from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from modals.budget_modal import BudgetMode
from modals.round_plan_modal import IntervalLevel
from modals.selection_modal import DEFAULT_ENS_TIMES
from utils.message import LOCAL_UPDATES_EXCLUSIVE


class BudgetConfig(BaseModel):
    """
    Schema for the communication budget regime.

    Attributes:
    - mode: fix (a beta share of all clients can afford high frequency) or
      dynamic (every client can, the server caps the round total).
    - beta: Budget level in (0, 1].
    """

    model_config = ConfigDict(extra="forbid")

    mode: BudgetMode = BudgetMode.fix
    beta: float = Field(0.3, gt=0, le=1)


class GeneticConfig(BaseModel):
    """Genetic-algorithm selector hyperparameters."""

    model_config = ConfigDict(extra="forbid")

    population: int = Field(50, ge=2)
    max_iters: int = Field(200, ge=1)
    mutation_prob: float = Field(0.01, ge=0, le=1)


class TrainingConfig(BaseModel):
    """
    Schema for the federated training loop.

    Attributes:
    - rounds: Total communication rounds T.
    - active_fraction: Fraction C of clients sampled per round.
    - local_epochs / local_updates: Exactly one is set; E derives L from the client sizes.
    - batch_size: Minibatch size B.
    - high_level / low_level: Interval levels of the two frequency groups.
    - algorithm: dynamicfl (selector-driven), dynamic_sgd (everyone at interval 1)
      or fedavg (everyone syncs once at the end of the round).
    - budget: Budget regime.
    - selection_method: Selector for the high-frequency subset.
    - participation: all actives train, or only the high-frequency subset (x* configurations).
    - ens_times: DynaComm ensemble passes.
    - random_fraction: Target fraction for the random selector; defaults to budget.beta.
    - eval_every: Evaluate on the held-out set every n rounds (and on the last round).
    - seed: Training seed; filled from the experiment's master seed when omitted.
    """

    model_config = ConfigDict(extra="forbid")

    rounds: int = Field(800, ge=0)
    active_fraction: float = Field(0.1, gt=0, le=1)
    local_epochs: Optional[int] = Field(None, ge=1)
    local_updates: Optional[int] = Field(None, ge=1)
    batch_size: int = Field(10, ge=1)
    high_level: IntervalLevel = IntervalLevel.a
    low_level: IntervalLevel = IntervalLevel.g
    algorithm: Literal["dynamicfl", "dynamic_sgd", "fedavg"] = "dynamicfl"
    budget: BudgetConfig = Field(default_factory=BudgetConfig)
    selection_method: Literal["dynacomm", "brute", "genetic", "random"] = "dynacomm"
    participation: Literal["all", "high_only"] = "all"
    ens_times: int = Field(DEFAULT_ENS_TIMES, ge=1)
    genetic: GeneticConfig = Field(default_factory=GeneticConfig)
    random_fraction: Optional[float] = Field(None, ge=0, le=1)
    eval_every: int = Field(1, ge=1)
    seed: Optional[int] = Field(None, ge=0)

    @model_validator(mode="before")
    @classmethod
    def default_local_epochs(cls, data):
        """
        Apply E = 5 when neither local_epochs nor local_updates is given.
        """
        if isinstance(data, dict) and data.get("local_epochs") is None and data.get("local_updates") is None:
            data = {**data, "local_epochs": 5}
        return data

    @model_validator(mode="after")
    def exactly_one_update_source(self):
        if (self.local_epochs is None) == (self.local_updates is None):
            raise ValueError(LOCAL_UPDATES_EXCLUSIVE)
        return self

    @property
    def target_fraction(self) -> float:
        return self.budget.beta if self.random_fraction is None else self.random_fraction
