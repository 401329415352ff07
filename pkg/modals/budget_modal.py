import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet


class BudgetMode(str, Enum):
    fix = "fix"
    dynamic = "dynamic"


@dataclass(frozen=True)
class BudgetSet:
    """
    Per-round communication budgets.

    Attributes:
        mode (BudgetMode): fix (client heterogeneity) or dynamic (server cap).
        beta (float): Budget level in (0, 1].
        client_budgets (Dict[int, float]): tau_m for every client id.
        server_budget (float): tau_g; math.inf in fix mode.
        high_capable (FrozenSet[int]): Clients whose tau_m admits high frequency (fix mode).
        high_round_cost (float): Round cost of one client at the high level.
        low_round_cost (float): Round cost of one client at the low level.
    """

    mode: BudgetMode
    beta: float
    client_budgets: Dict[int, float]
    server_budget: float = math.inf
    high_capable: FrozenSet[int] = field(default_factory=frozenset)
    high_round_cost: float = 0.0
    low_round_cost: float = 0.0

    def budget_of(self, client_id: int) -> float:
        return self.client_budgets[client_id]
