from dataclasses import dataclass, field

import numpy as np

from utils.errors import InputValidationError
from utils.message import (
    COUNT_NEGATIVE,
    NUM_CLASSES_MUST_BE_POSITIVE,
    PROBS_NEGATIVE,
    PROBS_NOT_NORMALISED,
)

# Tolerance on the probability mass of a non-empty distribution
PROBS_SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class LabelDistribution:
    """
    Probability vector over class labels together with the sample count behind it.

    The distribution with count 0 is the designated empty value; its probs are all
    zero and it may not enter KL computations.

    Attributes:
        probs (np.ndarray): Per-class probabilities, length num_classes.
        count (int): Number of labelled samples backing the distribution.
    """

    probs: np.ndarray
    count: int
    num_classes: int = field(init=False)

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.ndim != 1 or probs.size == 0:
            raise InputValidationError(NUM_CLASSES_MUST_BE_POSITIVE)
        if self.count < 0:
            raise InputValidationError(COUNT_NEGATIVE)
        if np.any(probs < 0):
            raise InputValidationError(PROBS_NEGATIVE)
        if self.count > 0 and abs(float(probs.sum()) - 1.0) > PROBS_SUM_TOLERANCE:
            raise InputValidationError(PROBS_NOT_NORMALISED.format(total=float(probs.sum())))
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "count", int(self.count))
        object.__setattr__(self, "num_classes", int(probs.size))

    @classmethod
    def empty(cls, num_classes: int) -> "LabelDistribution":
        if num_classes <= 0:
            raise InputValidationError(NUM_CLASSES_MUST_BE_POSITIVE)
        return cls(probs=np.zeros(num_classes), count=0)

    @property
    def is_empty(self) -> bool:
        return self.count == 0

    @property
    def mass(self) -> np.ndarray:
        """Per-class sample mass, probs scaled by count."""
        return self.probs * self.count
