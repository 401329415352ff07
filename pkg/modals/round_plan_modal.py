from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Tuple

import numpy as np


class IntervalLevel(str, Enum):
    """Communication interval levels: local updates between server syncs."""

    a = "a"
    b = "b"
    c = "c"
    d = "d"
    e = "e"
    f = "f"
    g = "g"

    @property
    def updates(self) -> int:
        return INTERVAL_UPDATES[self]


INTERVAL_UPDATES: Dict[IntervalLevel, int] = {
    IntervalLevel.a: 1,
    IntervalLevel.b: 4,
    IntervalLevel.c: 16,
    IntervalLevel.d: 32,
    IntervalLevel.e: 64,
    IntervalLevel.f: 128,
    IntervalLevel.g: 256,
}


@dataclass(frozen=True)
class ClientFrequency:
    """Per-client sync frequency nu and interval I for one round."""

    client_id: int
    nu: int
    interval: int
    high: bool


@dataclass(frozen=True)
class FrequencyAssignment:
    """
    Frequencies for every active client of a round.

    Attributes:
        clients (Dict[int, ClientFrequency]): Entry per active client id.
        nu_high (int): Sync events per round for the high-frequency group.
        nu_low (int): Sync events per round for the low-frequency group.
        local_updates (int): L, gradient updates in the round.
    """

    clients: Dict[int, ClientFrequency]
    nu_high: int
    nu_low: int
    local_updates: int

    def interval_of(self, client_id: int) -> int:
        return self.clients[client_id].interval

    def nu_of(self, client_id: int) -> int:
        return self.clients[client_id].nu


@dataclass
class RoundPlan:
    """
    Everything decided before local training starts in round t.

    Attributes:
        t (int): Round index, starting at 1.
        actives (Tuple[int, ...]): Sampled clients M^t in ascending id order.
        subset (Tuple[int, ...]): High-frequency subset z.
        assignment (FrequencyAssignment): nu and I per active client.
        participants (Tuple[int, ...]): Clients that train this round (all actives, or z only).
        schedule (Dict[int, Tuple[int, ...]]): Update index l -> clients U_l syncing at l.
        subset_kl (float): Divergence of z to the global distribution.
    """

    t: int
    actives: Tuple[int, ...]
    subset: Tuple[int, ...]
    assignment: FrequencyAssignment
    participants: Tuple[int, ...]
    schedule: Dict[int, Tuple[int, ...]] = field(default_factory=dict)
    subset_kl: float = float("inf")

    @property
    def sync_indices(self) -> List[int]:
        return sorted(self.schedule)


@dataclass
class RoundMetrics:
    """Per-round outcome reported by the engine."""

    t: int
    subset_size: int
    subset_kl: float
    round_cost: float
    normalized_cost: float
    cumulative_normalized_cost: float = 0.0
    test_loss: float = float("nan")
    test_accuracy: float = float("nan")
    wall_ms: float = 0.0
    skipped: bool = False
    sync_events: Dict[int, int] = field(default_factory=dict)


@dataclass
class TrainingHistory:
    """Collected RoundMetrics plus the final global parameters."""

    rounds: List[RoundMetrics] = field(default_factory=list)
    final_params: np.ndarray | None = None
