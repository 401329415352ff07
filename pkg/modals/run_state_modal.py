from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from modals.budget_modal import BudgetSet
from modals.client_dataset_modal import ClientDataset
from modals.cost_ledger_modal import CostLedger
from modals.label_distribution_modal import LabelDistribution
from modals.model_params_modal import ModelParams
from modals.round_plan_modal import TrainingHistory


@dataclass
class RunState:
    """
    State carried between rounds of one training run.

    Client parameters and optimiser buffers are not stored here: every round starts
    each client from global_params with a fresh optimiser state.

    Attributes:
        global_params (ModelParams): W_g after the last completed round.
        clients (Dict[int, ClientDataset]): Partitioned training data by client id.
        eligible (Tuple[int, ...]): Clients holding at least one sample.
        global_dist (LabelDistribution): p(Y) of the training set.
        L (int): Local updates per round.
        seed (int): Master seed of the run.
        budgets (BudgetSet, optional): Budgets of the dynamicfl algorithm.
        ledger (CostLedger): Communication costs so far.
        history (TrainingHistory): Metrics of completed rounds.
        t (int): Last completed round.
        total_updates (int): Gradient updates performed so far.
    """

    global_params: ModelParams
    clients: Dict[int, ClientDataset]
    eligible: Tuple[int, ...]
    global_dist: LabelDistribution
    L: int
    seed: int
    budgets: Optional[BudgetSet] = None
    ledger: CostLedger = field(default_factory=CostLedger)
    history: TrainingHistory = field(default_factory=TrainingHistory)
    t: int = 0
    total_updates: int = 0
