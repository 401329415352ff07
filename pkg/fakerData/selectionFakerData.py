import numpy as np

from modals.label_distribution_modal import LabelDistribution
from modals.selection_modal import Candidate, SelectionProblem
from services.datastats_services import joint_distribution


def random_selection_problem(
    rng: np.random.Generator,
    num_candidates: int = 10,
    num_classes: int = 10,
    alpha: float = 0.1,
    ens_times: int = 4,
) -> SelectionProblem:
    """
    Candidates with Dir(alpha) label mixes (one-class-heavy for small alpha) and random budgets.

    Each candidate costs 1 at low frequency and a random 2..10 at high frequency; about
    two thirds can afford their high cost. The server admits roughly half of the extra
    cost of putting everybody at high frequency. The global distribution is the joint of
    the candidates, so the full set has zero divergence.

    Args:
        rng (np.random.Generator): Source of randomness.
        num_candidates (int): Number of candidates.
        num_classes (int): Label-space size.
        alpha (float): Dirichlet concentration of the label mixes.
        ens_times (int): DynaComm passes.

    Returns:
        SelectionProblem: A seeded random problem.
    """
    candidates = []
    for client_id in range(num_candidates):
        count = int(rng.integers(20, 200))
        shares = rng.dirichlet(np.full(num_classes, alpha))
        histogram = rng.multinomial(count, shares)
        dist = LabelDistribution(probs=histogram / count, count=count)

        high_cost = float(rng.integers(2, 11))
        affordable = rng.random() < 2.0 / 3.0
        # Unaffordable clients can still pay for low frequency
        budget = high_cost if affordable else float(rng.uniform(1.0, high_cost))
        candidates.append(Candidate(client_id, dist, high_cost, budget, low_cost=1.0))

    extra = sum(candidate.high_cost - candidate.low_cost for candidate in candidates)
    server_budget = num_candidates * 1.0 + float(rng.uniform(0.3, 0.7)) * extra
    return SelectionProblem(
        candidates=tuple(candidates),
        server_budget=server_budget,
        global_dist=joint_distribution([candidate.dist for candidate in candidates]),
        ens_times=ens_times,
        seed=int(rng.integers(0, 2**32)),
    )


def planted_cover_problem(num_classes: int, count: int = 10, extra_clients: int = 0) -> SelectionProblem:
    """
    One one-hot candidate per class with equal counts under the uniform global distribution,
    ample budgets, plus optional duplicate-class distractors.
    """
    candidates = []
    for client_id in range(num_classes + extra_clients):
        probs = np.zeros(num_classes)
        probs[client_id % num_classes] = 1.0
        candidates.append(Candidate(client_id, LabelDistribution(probs=probs, count=count), 1.0, 1.0))
    uniform = LabelDistribution(probs=np.full(num_classes, 1.0 / num_classes), count=count * num_classes)
    return SelectionProblem(candidates=tuple(candidates), server_budget=float("inf"), global_dist=uniform)
