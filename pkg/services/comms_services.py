import logging
import math
from typing import Dict, Iterable, List, Sequence, Tuple

from modals.budget_modal import BudgetMode, BudgetSet
from modals.round_plan_modal import ClientFrequency, FrequencyAssignment, IntervalLevel
from seedings.seed import BUDGET_STREAM, derive_rng
from utils.errors import InputValidationError
from utils.message import BETA_RANGE, LOCAL_UPDATES_POSITIVE, SUBSET_NOT_IN_ACTIVES

logger = logging.getLogger(__name__)

# Guards floor() against products such as 0.3 * 10 = 2.9999999999999996
FLOOR_EPSILON = 1e-9


def active_count(active_fraction: float, num_clients: int) -> int:
    """Clients sampled per round: max(floor(C * M), 1)."""
    return max(int(math.floor(active_fraction * num_clients + FLOOR_EPSILON)), 1)


def sync_points(L: int, interval: int) -> List[int]:
    """
    Update indices at which a client with the given interval syncs.

    {l in 1..L : l mod interval = 0} plus the final update L; nu is the length
    of the returned list.

    Args:
        L (int): Local updates in the round.
        interval (int): Updates between syncs.

    Returns:
        List[int]: Ascending update indices.
    """
    if L < 1 or interval < 1:
        raise InputValidationError(LOCAL_UPDATES_POSITIVE)
    points = list(range(interval, L + 1, interval))
    if not points or points[-1] != L:
        points.append(L)
    return points


def client_cost(model_size: int, nu: int) -> float:
    """Per-client round cost: upload plus download of the model at every sync, 2 * |W| * nu."""
    return float(2 * model_size * nu)


def round_cost(assignment: FrequencyAssignment, model_size: int) -> Tuple[Dict[int, float], float]:
    """
    Per-client costs of a round and the server total kappa_g.

    Args:
        assignment (FrequencyAssignment): nu for every active client.
        model_size (int): |W|.

    Returns:
        Tuple[Dict[int, float], float]: kappa_m per client id and their sum.
    """
    per_client = {
        client_id: client_cost(model_size, entry.nu)
        for client_id, entry in sorted(assignment.clients.items())
    }
    return per_client, math.fsum(per_client.values())


def reference_cost(L: int, model_size: int, actives: int) -> float:
    """DynamicSGD cost of a round: every active client syncs after every update."""
    if L < 1:
        raise InputValidationError(LOCAL_UPDATES_POSITIVE)
    return client_cost(model_size, L) * actives


def normalized_cost(
    server_costs: Iterable[float], L: int, model_size: int, actives: int
) -> List[float]:
    """
    Standardise per-round server costs against DynamicSGD at the same L, model size
    and active count.

    Args:
        server_costs (Iterable[float]): kappa_g per round.
        L (int): Local updates per round.
        model_size (int): |W|.
        actives (int): Active clients per round.

    Returns:
        List[float]: Per-round normalised costs (1.0 means DynamicSGD cost).
    """
    denominator = reference_cost(L, model_size, actives)
    return [cost / denominator for cost in server_costs]


def make_budgets(
    mode: BudgetMode,
    beta: float,
    num_clients: int,
    model_size: int,
    L: int,
    high_level: IntervalLevel,
    low_level: IntervalLevel,
    seed: int,
    active_fraction: float = 0.1,
) -> BudgetSet:
    """
    Build per-client budgets tau_m and the server budget tau_g.

    fix: a seeded floor(beta * M) subset of clients can afford the high-frequency round
    cost, the rest exactly the low-frequency cost; tau_g is unbounded.
    dynamic: every client can afford high frequency and the server admits floor(beta * A)
    high-frequency clients among the A = max(C * M, 1) actives.

    Args:
        mode (BudgetMode): Budget regime.
        beta (float): Budget level in (0, 1].
        num_clients (int): M; client ids are 0..M-1.
        model_size (int): |W|.
        L (int): Local updates per round.
        high_level (IntervalLevel): Interval of the high-frequency group.
        low_level (IntervalLevel): Interval of the low-frequency group.
        seed (int): Seed of the budget stream.
        active_fraction (float): C, used for the dynamic server cap.

    Returns:
        BudgetSet: The budgets.
    """
    if not 0 < beta <= 1:
        raise InputValidationError(BETA_RANGE)
    mode = BudgetMode(mode)
    high_cost = client_cost(model_size, len(sync_points(L, high_level.updates)))
    low_cost = client_cost(model_size, len(sync_points(L, low_level.updates)))

    if mode == BudgetMode.fix:
        capable_count = int(math.floor(beta * num_clients + FLOOR_EPSILON))
        rng = derive_rng(seed, BUDGET_STREAM)
        high_capable = frozenset(int(c) for c in rng.choice(num_clients, size=capable_count, replace=False))
        budgets = {
            client_id: high_cost if client_id in high_capable else low_cost
            for client_id in range(num_clients)
        }
        logger.debug("Fix budgets: %d of %d clients high-capable", capable_count, num_clients)
        return BudgetSet(mode, beta, budgets, math.inf, high_capable, high_cost, low_cost)

    actives = active_count(active_fraction, num_clients)
    high_slots = int(math.floor(beta * actives + FLOOR_EPSILON))
    server_budget = high_slots * high_cost + (actives - high_slots) * low_cost
    logger.debug("Dynamic budgets: server admits %d of %d actives at high frequency", high_slots, actives)
    return BudgetSet(
        mode,
        beta,
        {client_id: high_cost for client_id in range(num_clients)},
        server_budget,
        frozenset(range(num_clients)),
        high_cost,
        low_cost,
    )


def assign_intervals(
    actives: Sequence[int], subset: Iterable[int], L: int, high_interval: int, low_interval: int
) -> FrequencyAssignment:
    """
    Give members of the subset the high interval and every other active the low one.

    Raises:
        InputValidationError: If the subset contains a client that is not active.
    """
    subset = set(subset)
    extra = sorted(subset.difference(actives))
    if extra:
        raise InputValidationError(SUBSET_NOT_IN_ACTIVES.format(extra=extra))

    nu_high = len(sync_points(L, high_interval))
    nu_low = len(sync_points(L, low_interval))
    clients = {}
    for client_id in sorted(actives):
        high = client_id in subset
        clients[client_id] = ClientFrequency(
            client_id=client_id,
            nu=nu_high if high else nu_low,
            interval=high_interval if high else low_interval,
            high=high,
        )
    return FrequencyAssignment(clients, nu_high, nu_low, L)


def assign_frequencies(
    actives: Sequence[int],
    subset: Iterable[int],
    L: int,
    high_level: IntervalLevel,
    low_level: IntervalLevel,
) -> FrequencyAssignment:
    """Level-based wrapper around assign_intervals."""
    return assign_intervals(
        actives, subset, L, IntervalLevel(high_level).updates, IntervalLevel(low_level).updates
    )


def sync_schedule(assignment: FrequencyAssignment, participants: Iterable[int]) -> Dict[int, Tuple[int, ...]]:
    """
    Map every update index l with at least one sync to the ascending client ids U_l syncing there.
    """
    schedule: Dict[int, List[int]] = {}
    for client_id in sorted(participants):
        for point in sync_points(assignment.local_updates, assignment.interval_of(client_id)):
            schedule.setdefault(point, []).append(client_id)
    return {point: tuple(schedule[point]) for point in sorted(schedule)}
