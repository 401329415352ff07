import copy
import logging
from typing import List, Optional, Tuple

from modals.client_dataset_modal import ClientDataset, Dataset
from modals.run_state_modal import RunState
from schemas.experiment_schema import ExperimentConfig
from schemas.response_schema import MetricsRecord
from services.datastats_services import load_csv_dataset, partition, synth_blobs, train_test_split
from services.model_services import resolve_objective
from utils.common import read_json_file

logger = logging.getLogger(__name__)


def parse_config(path, seed: Optional[int] = None) -> ExperimentConfig:
    """
    Read and validate an experiment config.

    A seed override replaces the master seed and drops any nested partition/training
    seeds so they are re-derived from it.

    Args:
        path: JSON config location.
        seed (int, optional): Master seed override.

    Returns:
        ExperimentConfig: The validated config with every default applied.

    Raises:
        InputValidationError: If the file is missing or not JSON.
        pydantic.ValidationError: If a field is unknown or invalid.
    """
    raw = read_json_file(path)
    if seed is not None and isinstance(raw, dict):
        raw = copy.deepcopy(raw)
        raw["seed"] = seed
        for block in ("partition", "training"):
            if isinstance(raw.get(block), dict):
                raw[block].pop("seed", None)
    return ExperimentConfig.model_validate(raw)


def load_dataset(config: ExperimentConfig) -> Dataset:
    dataset_config = config.dataset
    if dataset_config.kind == "csv":
        return load_csv_dataset(dataset_config.csv_path)
    return synth_blobs(
        dataset_config.num_classes,
        dataset_config.dims,
        dataset_config.per_class,
        dataset_config.spread,
        config.seed,
    )


def prepare_experiment(config: ExperimentConfig) -> Tuple[List[ClientDataset], Dataset, Dataset]:
    """
    Build the data of an experiment and resolve the objective against it.

    The config's model.objective is replaced by its resolved form so the echoed
    config pins num_classes and feature_dim.

    Returns:
        Tuple[List[ClientDataset], Dataset, Dataset]: (clients, train, test).
    """
    dataset = load_dataset(config)
    train, test = train_test_split(dataset, config.dataset.test_fraction, config.seed)
    clients = partition(train, config.partition)
    config.model.objective = resolve_objective(config.model.objective, train)
    logger.info(
        "Prepared %d train / %d test samples over %d clients", len(train), len(test), len(clients)
    )
    return clients, train, test


def metrics_records(state: RunState) -> List[MetricsRecord]:
    """One MetricsRecord per completed round."""
    return [
        MetricsRecord(
            t=metrics.t,
            test_loss=metrics.test_loss,
            test_accuracy=metrics.test_accuracy,
            subset_size=metrics.subset_size,
            subset_kl=metrics.subset_kl,
            round_cost=metrics.round_cost,
            normalized_cost=metrics.normalized_cost,
            cumulative_normalized_cost=metrics.cumulative_normalized_cost,
            wall_ms=metrics.wall_ms,
        )
        for metrics in state.history.rounds
    ]
