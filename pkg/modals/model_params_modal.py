from dataclasses import dataclass
from typing import Tuple

import numpy as np

from utils.errors import InputValidationError
from utils.message import PARAMS_LAYOUT_MISMATCH

Layout = Tuple[Tuple[str, Tuple[int, ...]], ...]


@dataclass
class ModelParams:
    """
    Flat parameter vector W with named, shaped segments.

    Attributes:
        values (np.ndarray): Flat float64 vector of length size.
        layout (Layout): Ordered (name, shape) segments; identical for every
            client and the server within a run.
    """

    values: np.ndarray
    layout: Layout

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        expected = sum(int(np.prod(shape)) for _, shape in self.layout)
        if expected != self.values.size:
            raise InputValidationError(PARAMS_LAYOUT_MISMATCH)

    @property
    def size(self) -> int:
        """|W|, the total parameter count."""
        return int(self.values.size)

    def segment(self, name: str) -> np.ndarray:
        """Return a shaped view of one named segment."""
        offset = 0
        for segment_name, shape in self.layout:
            length = int(np.prod(shape))
            if segment_name == name:
                return self.values[offset:offset + length].reshape(shape)
            offset += length
        raise KeyError(name)

    def copy(self) -> "ModelParams":
        return ModelParams(self.values.copy(), self.layout)

    def with_values(self, values: np.ndarray) -> "ModelParams":
        return ModelParams(values, self.layout)

    def check_layout(self, other: "ModelParams") -> None:
        if self.layout != other.layout:
            raise InputValidationError(PARAMS_LAYOUT_MISMATCH)

    @classmethod
    def from_segments(cls, segments) -> "ModelParams":
        """Build from an ordered iterable of (name, array) pairs."""
        layout = tuple((name, tuple(np.shape(array))) for name, array in segments)
        values = np.concatenate([np.asarray(array, dtype=np.float64).reshape(-1) for _, array in segments])
        return cls(values, layout)
