import math
from dataclasses import dataclass, field
from typing import FrozenSet, List, Tuple

from modals.label_distribution_modal import LabelDistribution
from utils.errors import InputValidationError
from utils.message import CANDIDATE_COST_NEGATIVE, CANDIDATE_DUPLICATE, NUM_CLASSES_MISMATCH

# Shuffled DP passes when none are configured
DEFAULT_ENS_TIMES = 4


@dataclass(frozen=True)
class Candidate:
    """
    One active client offered to a selector.

    Attributes:
        client_id (int): Client identifier.
        dist (LabelDistribution): The client's label distribution p(y_m).
        high_cost (float): Round cost kappa_m at the high frequency.
        low_cost (float): Round cost kappa_m at the low frequency.
        budget (float): Per-round budget tau_m.
    """

    client_id: int
    dist: LabelDistribution
    high_cost: float
    budget: float
    low_cost: float = 0.0

    @property
    def can_go_high(self) -> bool:
        return self.high_cost <= self.budget


@dataclass(frozen=True)
class SelectionProblem:
    """
    Budget-constrained choice of the high-frequency subset for one round.

    Attributes:
        candidates (Tuple[Candidate, ...]): Active clients M^t.
        server_budget (float): tau_g, may be math.inf.
        global_dist (LabelDistribution): Target distribution p(Y).
        ens_times (int): Number of shuffled DP passes (eta_ens).
        seed (int): Seed for every random choice the selectors make.
    """

    candidates: Tuple[Candidate, ...]
    server_budget: float
    global_dist: LabelDistribution
    ens_times: int = DEFAULT_ENS_TIMES
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))
        seen = set()
        for candidate in self.candidates:
            if candidate.client_id in seen:
                raise InputValidationError(CANDIDATE_DUPLICATE.format(client_id=candidate.client_id))
            seen.add(candidate.client_id)
            if min(candidate.high_cost, candidate.low_cost, candidate.budget) < 0:
                raise InputValidationError(CANDIDATE_COST_NEGATIVE.format(client_id=candidate.client_id))
            if candidate.dist.num_classes != self.global_dist.num_classes:
                raise InputValidationError(
                    NUM_CLASSES_MISMATCH.format(
                        left=candidate.dist.num_classes, right=self.global_dist.num_classes
                    )
                )
        if self.server_budget < 0:
            raise InputValidationError(CANDIDATE_COST_NEGATIVE.format(client_id="server"))
        if self.ens_times < 1:
            raise InputValidationError("ens_times must be at least 1.")

    @property
    def size(self) -> int:
        return len(self.candidates)

    @property
    def client_ids(self) -> List[int]:
        return [candidate.client_id for candidate in self.candidates]

    def server_cost(self, high_indices) -> float:
        """
        Server cost of a round where the given candidate indices run at high
        frequency and every other candidate runs at low frequency.
        """
        high = set(high_indices)
        return math.fsum(
            candidate.high_cost if index in high else candidate.low_cost
            for index, candidate in enumerate(self.candidates)
        )

    def is_feasible(self, high_indices) -> bool:
        high_indices = list(high_indices)
        if any(not self.candidates[index].can_go_high for index in high_indices):
            return False
        return self.server_cost(high_indices) <= self.server_budget


@dataclass
class SelectionCell:
    """
    One cell O[i, j] of the DynaComm matrix.

    Attributes:
        kl (float): Divergence of the stored subset; math.inf for the empty sentinel.
        clients (FrozenSet[int]): Candidate indices of the stored subset.
    """

    kl: float = math.inf
    clients: FrozenSet[int] = field(default_factory=frozenset)


@dataclass(frozen=True)
class SelectionResult:
    """
    Outcome of a selector.

    Attributes:
        subset (Tuple[int, ...]): Selected client ids in ascending order (possibly empty).
        kl (float): KL divergence of the subset to the global distribution; math.inf when empty.
        feasible (bool): Whether the subset honours every budget.
        server_cost_if_adopted (float): Server cost with the subset at high frequency.
    """

    subset: Tuple[int, ...]
    kl: float
    feasible: bool
    server_cost_if_adopted: float

    @property
    def size(self) -> int:
        return len(self.subset)
