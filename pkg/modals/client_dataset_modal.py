from dataclasses import dataclass

import numpy as np

from modals.label_distribution_modal import LabelDistribution
from utils.errors import InputValidationError
from utils.message import DATASET_SHAPE_MISMATCH, LABEL_OUT_OF_RANGE


@dataclass(frozen=True)
class Dataset:
    """
    A labelled feature matrix.

    Attributes:
        features (np.ndarray): Matrix of shape (samples, dims).
        labels (np.ndarray): Integer class index per row.
        num_classes (int): Size of the label space.
    """

    features: np.ndarray
    labels: np.ndarray
    num_classes: int

    def __post_init__(self):
        features = np.asarray(self.features, dtype=np.float64)
        if features.ndim == 1:
            features = features.reshape(-1, 1)
        labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if features.shape[0] != labels.shape[0]:
            raise InputValidationError(
                DATASET_SHAPE_MISMATCH.format(rows=features.shape[0], labels=labels.shape[0])
            )
        if labels.size and (labels.min() < 0 or labels.max() >= self.num_classes):
            bad = int(labels.min()) if labels.min() < 0 else int(labels.max())
            raise InputValidationError(
                LABEL_OUT_OF_RANGE.format(label=bad, num_classes=self.num_classes)
            )
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    @property
    def dims(self) -> int:
        return int(self.features.shape[1])

    def subset(self, indices) -> "Dataset":
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(self.features[indices], self.labels[indices], self.num_classes)


@dataclass(frozen=True)
class ClientDataset:
    """
    One client's local data D_m plus its label statistics.

    Attributes:
        client_id (int): Stable identifier of the client.
        features (np.ndarray): Local feature rows x_m.
        labels (np.ndarray): Local labels y_m.
        label_dist (LabelDistribution): Empirical distribution p(y_m) with count |D_m|.
    """

    client_id: int
    features: np.ndarray
    labels: np.ndarray
    label_dist: LabelDistribution

    def __post_init__(self):
        rows = int(np.asarray(self.features).shape[0])
        if rows != len(self.labels) or rows != self.label_dist.count:
            raise InputValidationError(
                DATASET_SHAPE_MISMATCH.format(rows=rows, labels=len(self.labels))
            )

    @property
    def size(self) -> int:
        return self.label_dist.count

    @property
    def num_classes(self) -> int:
        return self.label_dist.num_classes

    def as_dataset(self) -> Dataset:
        return Dataset(self.features, self.labels, self.num_classes)
