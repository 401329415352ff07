import math
from dataclasses import dataclass, field
from typing import Dict, List


@dataclass
class LedgerEntry:
    t: int
    client_costs: Dict[int, float]
    server_cost: float
    reference_cost: float

    @property
    def normalized(self) -> float:
        return self.server_cost / self.reference_cost if self.reference_cost > 0 else 0.0


@dataclass
class CostLedger:
    """
    Per-round communication costs kappa_m^t and kappa_g^t with cumulative totals.

    Only the engine's orchestration thread writes to a ledger.
    """

    entries: List[LedgerEntry] = field(default_factory=list)
    client_totals: Dict[int, float] = field(default_factory=dict)
    server_total: float = 0.0
    cumulative_normalized: float = 0.0

    def record(self, t: int, client_costs: Dict[int, float], reference_cost: float) -> LedgerEntry:
        """
        Append round t. kappa_g^t is the sum of the per-client costs.

        Args:
            t (int): Round index.
            client_costs (Dict[int, float]): kappa_m^t for every client billed this round.
            reference_cost (float): DynamicSGD cost used as normalization denominator.

        Returns:
            LedgerEntry: The stored entry.
        """
        server_cost = math.fsum(client_costs[client_id] for client_id in sorted(client_costs))
        entry = LedgerEntry(t, dict(client_costs), server_cost, reference_cost)
        self.entries.append(entry)
        for client_id, cost in client_costs.items():
            self.client_totals[client_id] = self.client_totals.get(client_id, 0.0) + cost
        self.server_total += server_cost
        self.cumulative_normalized += entry.normalized
        return entry

    @property
    def normalized_series(self) -> List[float]:
        return [entry.normalized for entry in self.entries]
