from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class PartitionSpec(BaseModel):
    """
    Schema describing how the training set is split across clients.

    Attributes:
    - mode: balanced_k (equal volumes from K classes per client) or dirichlet (Dir(alpha) class shares).
    - K: Classes per client in balanced mode.
    - alpha: Dirichlet concentration in dirichlet mode; smaller means more heterogeneous.
    - num_clients: Total client count M.
    - seed: Partition seed; filled from the experiment's master seed when omitted.
    """

    model_config = ConfigDict(extra="forbid")

    mode: Literal["balanced_k", "dirichlet"] = "balanced_k"
    K: Optional[int] = Field(None, ge=1)
    alpha: Optional[float] = Field(None, gt=0)
    num_clients: int = Field(100, ge=1)
    seed: Optional[int] = Field(None, ge=0)

    @model_validator(mode="after")
    def mode_parameters_present(self):
        """
        Ensure the parameter required by the chosen mode is present.

        Raises:
            ValueError: If balanced mode lacks K or dirichlet mode lacks alpha.
        """
        if self.mode == "balanced_k" and self.K is None:
            raise ValueError("balanced_k partitions require K")
        if self.mode == "dirichlet" and self.alpha is None:
            raise ValueError("dirichlet partitions require alpha")
        return self
