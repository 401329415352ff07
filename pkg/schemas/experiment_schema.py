from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from schemas.model_schema import ModelConfig
from schemas.partition_schema import PartitionSpec
from schemas.training_schema import TrainingConfig
from utils.message import TEST_FRACTION_RANGE


class DatasetConfig(BaseModel):
    """
    Schema for the dataset block.

    Attributes:
    - kind: synthetic (Gaussian blobs) or csv (file with a header, label in the last column).
    - num_classes, dims, per_class, spread: Blob parameters for synthetic datasets.
    - csv_path: Path of the CSV file when kind is csv.
    - test_fraction: Share of every class held out for evaluation.
    """

    model_config = ConfigDict(extra="forbid")

    kind: Literal["synthetic", "csv"] = "synthetic"
    num_classes: int = Field(10, ge=1)
    dims: int = Field(20, ge=1)
    per_class: int = Field(200, ge=1)
    spread: float = Field(0.5, ge=0)
    csv_path: Optional[str] = None
    test_fraction: float = 0.2

    @field_validator("test_fraction")
    def validate_test_fraction(cls, v):
        if not 0 <= v < 1:
            raise ValueError(TEST_FRACTION_RANGE)
        return v

    @model_validator(mode="after")
    def csv_needs_path(self):
        if self.kind == "csv" and not self.csv_path:
            raise ValueError("csv datasets require csv_path")
        return self


class OutputConfig(BaseModel):
    """
    Schema for the output block.

    Attributes:
    - directory: Where metrics and the resolved config are written; --out overrides it.
    - formats: Metrics formats to emit.
    - record_wall_time: Fill wall_ms with measured round time (breaks byte-identical reruns).
    """

    model_config = ConfigDict(extra="forbid")

    directory: Optional[str] = None
    formats: List[Literal["csv", "json"]] = Field(default_factory=lambda: ["csv", "json"])
    record_wall_time: bool = False


class ExperimentConfig(BaseModel):
    """
    Top-level experiment configuration.

    Unknown keys anywhere in the tree are rejected. The master seed feeds every
    nested seed that is left unset, so a resolved config carries all of them.
    """

    model_config = ConfigDict(extra="forbid")

    seed: int = Field(0, ge=0)
    dataset: DatasetConfig = Field(default_factory=DatasetConfig)
    partition: PartitionSpec = Field(default_factory=lambda: PartitionSpec(K=2))
    training: TrainingConfig = Field(default_factory=TrainingConfig)
    model: ModelConfig = Field(default_factory=ModelConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)

    @model_validator(mode="after")
    def propagate_seed(self):
        """
        Fill partition and training seeds from the master seed.
        """
        if self.partition.seed is None:
            self.partition.seed = self.seed
        if self.training.seed is None:
            self.training.seed = self.seed
        return self
