from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass
class OptimizerState:
    """
    Per-client SGD state for one round.

    Attributes:
        velocity (np.ndarray, optional): Momentum buffer; None until the first step.
        steps (int): Steps taken since the state was created.
    """

    velocity: Optional[np.ndarray] = None
    steps: int = 0
