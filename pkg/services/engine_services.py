import logging
import math
import os
import time
from concurrent.futures import Executor, ThreadPoolExecutor
from contextlib import nullcontext
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from modals.client_dataset_modal import ClientDataset, Dataset
from modals.model_params_modal import ModelParams
from modals.optimizer_state_modal import OptimizerState
from modals.round_plan_modal import RoundMetrics, RoundPlan
from modals.run_state_modal import RunState
from modals.selection_modal import Candidate, SelectionProblem
from schemas.model_schema import ModelConfig, Objective, OptimizerConfig
from schemas.training_schema import TrainingConfig
from seedings.seed import ACTIVES_STREAM, CLIENT_STREAM, DYNACOMM_STREAM, INIT_STREAM, derive_rng, derive_seed
from services.comms_services import (
    active_count,
    assign_intervals,
    client_cost,
    make_budgets,
    reference_cost,
    round_cost,
    sync_schedule,
)
from services.datastats_services import joint_distribution, kl_divergence
from services.dynacomm_services import run_selector
from services.model_services import evaluate, init_params, loss_and_grad, sample_batch, sgd_step
from utils.errors import InputValidationError, NumericError
from utils.message import (
    AGGREGATE_EMPTY,
    AGGREGATE_ZERO_WEIGHT,
    EMPTY_CLIENTS_EXCLUDED,
    LEDGER_MISMATCH,
    NO_CLIENTS_WITH_DATA,
    NO_FEASIBLE_SUBSET,
    ROUND_COMPLETED,
    ROUND_SKIPPED_EMPTY_SUBSET,
)

logger = logging.getLogger(__name__)


def compute_L(sizes: Sequence[int], local_epochs: int, batch_size: int, num_clients: Optional[int] = None) -> int:
    """
    Local updates per round so every client performs the same number of steps.

    L = round(sum |D_m| * E / (M * B)), at least 1.

    Args:
        sizes (Sequence[int]): |D_m| for every client.
        local_epochs (int): E.
        batch_size (int): B.
        num_clients (int, optional): M; len(sizes) when omitted.

    Returns:
        int: L.
    """
    num_clients = len(sizes) if num_clients is None else num_clients
    if local_epochs <= 0 or batch_size <= 0 or num_clients <= 0 or any(size < 0 for size in sizes):
        raise InputValidationError("compute_L needs positive sizes, epochs, batch size and clients.")
    exact = sum(sizes) * local_epochs / (num_clients * batch_size)
    return max(1, int(math.floor(exact + 0.5)))


def weighted_average(
    models: Sequence[Tuple[ModelParams, float]], client_ids: Optional[Sequence[int]] = None
) -> ModelParams:
    """
    Data-weighted average of client models.

    Models are reduced in ascending client-id order (list order when ids are omitted)
    as base + sum (w_m / W) (W_m - base), with base the first model, so averaging
    identical models returns them bit for bit and arrival order never matters.

    Args:
        models (Sequence[Tuple[ModelParams, float]]): (params, weight) pairs.
        client_ids (Sequence[int], optional): Client id of every pair.

    Returns:
        ModelParams: The average.

    Raises:
        InputValidationError: On an empty input, mismatched layouts or non-positive total weight.
    """
    if not models:
        raise InputValidationError(AGGREGATE_EMPTY)
    ids = list(range(len(models))) if client_ids is None else list(client_ids)
    ordered = [models[position] for position in sorted(range(len(models)), key=lambda p: ids[p])]

    weights = np.array([float(weight) for _, weight in ordered])
    if np.any(weights < 0) or weights.sum() <= 0:
        raise InputValidationError(AGGREGATE_ZERO_WEIGHT)
    total = weights.sum()

    base = ordered[0][0]
    result = base.values.copy()
    for (params, _), weight in zip(ordered, weights):
        base.check_layout(params)
        result += (weight / total) * (params.values - base.values)
    return base.with_values(result)


def init_run(training: TrainingConfig, model: ModelConfig, clients: Sequence[ClientDataset]) -> RunState:
    """
    Prepare a run: derive L, build budgets and initialise W_g.

    Clients without samples are excluded from sampling.
    """
    eligible = tuple(client.client_id for client in clients if client.size > 0)
    if not eligible:
        raise InputValidationError(NO_CLIENTS_WITH_DATA)
    if len(eligible) < len(clients):
        logger.warning(EMPTY_CLIENTS_EXCLUDED.format(count=len(clients) - len(eligible)))

    if training.local_updates is not None:
        L = training.local_updates
    else:
        L = compute_L([client.size for client in clients], training.local_epochs, training.batch_size)

    seed = training.seed or 0
    params = init_params(model.objective, derive_rng(seed, INIT_STREAM))
    budgets = None
    if training.algorithm == "dynamicfl":
        budgets = make_budgets(
            training.budget.mode,
            training.budget.beta,
            len(clients),
            params.size,
            L,
            training.high_level,
            training.low_level,
            seed,
            training.active_fraction,
        )
    logger.info("Run prepared: %d clients, L=%d, |W|=%d, algorithm=%s", len(clients), L, params.size, training.algorithm)
    return RunState(
        global_params=params,
        clients={client.client_id: client for client in clients},
        eligible=eligible,
        global_dist=joint_distribution([client.label_dist for client in clients]),
        L=L,
        seed=seed,
        budgets=budgets,
    )


def _intervals(training: TrainingConfig, L: int) -> Tuple[int, int]:
    if training.algorithm == "dynamic_sgd":
        return 1, 1
    if training.algorithm == "fedavg":
        return L, L
    return training.high_level.updates, training.low_level.updates


def plan_round(state: RunState, training: TrainingConfig, t: int) -> RoundPlan:
    """
    Sample the actives of round t, pick the high-frequency subset and lay out the sync schedule.

    Args:
        state (RunState): Current run state.
        training (TrainingConfig): Training configuration.
        t (int): Round index starting at 1.

    Returns:
        RoundPlan: Actives, subset, frequencies and U_l for every sync point.
    """
    rng = derive_rng(state.seed, ACTIVES_STREAM, t)
    count = min(active_count(training.active_fraction, len(state.clients)), len(state.eligible))
    actives = tuple(sorted(int(c) for c in rng.choice(np.array(state.eligible), size=count, replace=False)))

    if training.algorithm == "dynamic_sgd":
        subset = actives
        subset_kl = kl_divergence(
            joint_distribution([state.clients[c].label_dist for c in actives]), state.global_dist
        )
    elif training.algorithm == "fedavg":
        subset, subset_kl = (), math.inf
    else:
        budgets = state.budgets
        problem = SelectionProblem(
            candidates=tuple(
                Candidate(
                    client_id=client_id,
                    dist=state.clients[client_id].label_dist,
                    high_cost=budgets.high_round_cost,
                    budget=budgets.budget_of(client_id),
                    low_cost=budgets.low_round_cost,
                )
                for client_id in actives
            ),
            server_budget=budgets.server_budget,
            global_dist=state.global_dist,
            ens_times=training.ens_times,
            seed=derive_seed(state.seed, DYNACOMM_STREAM, t),
        )
        result = run_selector(
            problem,
            training.selection_method,
            target_fraction=training.target_fraction,
            population=training.genetic.population,
            max_iters=training.genetic.max_iters,
            mutation_prob=training.genetic.mutation_prob,
        )
        subset, subset_kl = result.subset, result.kl
        if not subset:
            logger.warning(NO_FEASIBLE_SUBSET.format(t=t))

    high_interval, low_interval = _intervals(training, state.L)
    assignment = assign_intervals(actives, subset, state.L, high_interval, low_interval)
    participants = actives if training.participation == "all" else tuple(subset)
    return RoundPlan(
        t=t,
        actives=actives,
        subset=tuple(subset),
        assignment=assignment,
        participants=participants,
        schedule=sync_schedule(assignment, participants),
        subset_kl=subset_kl,
    )


def execute_round(
    plan: RoundPlan,
    global_params: ModelParams,
    clients: Dict[int, ClientDataset],
    objective: Objective,
    optimizer: OptimizerConfig,
    batch_size: int,
    seed: int,
    total_steps: Optional[int] = None,
    executor: Optional[Executor] = None,
) -> Tuple[ModelParams, Dict[int, int]]:
    """
    Run the local updates of one round with interval-triggered aggregation.

    Every participant starts from global_params with fresh optimiser state and takes
    L steps. At each sync point l the clients in U_l upload, the server averages them
    weighted by |D_m| and sends the average back to exactly those clients. The
    aggregate at l = L, which includes every participant, is the new W_g.

    Args:
        plan (RoundPlan): Round layout.
        global_params (ModelParams): W_g^{t-1}.
        clients (Dict[int, ClientDataset]): Client data by id.
        objective (Objective): Resolved objective.
        optimizer (OptimizerConfig): Local optimiser.
        batch_size (int): B.
        seed (int): Master seed; client batches use the (seed, t, client) stream.
        total_steps (int, optional): Horizon of the cosine schedule.
        executor (Executor, optional): Runs client blocks concurrently between sync points.

    Returns:
        Tuple[ModelParams, Dict[int, int]]: New W_g and the sync events each client performed.
    """
    participants = plan.participants
    if not participants:
        return global_params, {}

    L = plan.assignment.local_updates
    local = {client_id: global_params.copy() for client_id in participants}
    states = {client_id: OptimizerState() for client_id in participants}
    rngs = {client_id: derive_rng(seed, CLIENT_STREAM, plan.t, client_id) for client_id in participants}
    data: Dict[int, Dataset] = {client_id: clients[client_id].as_dataset() for client_id in participants}
    events = {client_id: 0 for client_id in participants}

    def run_block(client_id: int, first: int, last: int) -> ModelParams:
        params = local[client_id]
        for l in range(first, last + 1):
            batch = sample_batch(data[client_id], batch_size, rngs[client_id])
            _, grad = loss_and_grad(objective, params, batch)
            params = sgd_step(params, grad, states[client_id], optimizer, (plan.t - 1) * L + l - 1, total_steps)
        return params

    previous = 0
    for point in plan.sync_indices:
        first = previous + 1
        if executor is not None:
            updated = list(executor.map(lambda client_id: run_block(client_id, first, point), participants))
        else:
            updated = [run_block(client_id, first, point) for client_id in participants]
        local.update(zip(participants, updated))

        members = plan.schedule[point]
        average = weighted_average(
            [(local[client_id], clients[client_id].size) for client_id in members], members
        )
        for client_id in members:
            local[client_id] = average.copy()
            events[client_id] += 1
        previous = point

    return average, events


def _bill_round(state: RunState, plan: RoundPlan, events: Dict[int, int]) -> Tuple[float, float]:
    """Record the round in the ledger and check it against the planned frequencies."""
    size = state.global_params.size
    billed = {client_id: client_cost(size, count) for client_id, count in sorted(events.items())}
    entry = state.ledger.record(plan.t, billed, reference_cost(state.L, size, len(plan.actives)))

    planned, _ = round_cost(plan.assignment, size)
    expected = math.fsum(planned[client_id] for client_id in sorted(events))
    if entry.server_cost != expected:
        raise NumericError(LEDGER_MISMATCH.format(t=plan.t, billed=entry.server_cost, expected=expected))
    return entry.server_cost, entry.normalized


def run_round(
    state: RunState,
    training: TrainingConfig,
    model: ModelConfig,
    test: Optional[Dataset] = None,
    executor: Optional[Executor] = None,
    record_wall_time: bool = False,
) -> RoundMetrics:
    """
    Execute round state.t + 1 and append its metrics to the run history.

    With participation=high_only and an empty subset the round is skipped: W_g is
    unchanged and nothing is billed.

    Returns:
        RoundMetrics: Metrics of the completed round.
    """
    started = time.perf_counter()
    t = state.t + 1
    plan = plan_round(state, training, t)
    total_steps = model.optimizer.total_steps or max(training.rounds * state.L, 1)

    skipped = not plan.participants
    if skipped:
        logger.warning(ROUND_SKIPPED_EMPTY_SUBSET.format(t=t))
        events: Dict[int, int] = {}
    else:
        state.global_params, events = execute_round(
            plan,
            state.global_params,
            state.clients,
            model.objective,
            model.optimizer,
            training.batch_size,
            state.seed,
            total_steps,
            executor,
        )
        state.total_updates += len(plan.participants) * state.L

    round_server_cost, normalized = _bill_round(state, plan, events)

    loss, accuracy = math.nan, math.nan
    if test is not None and (t % training.eval_every == 0 or t == training.rounds):
        loss, accuracy = evaluate(model.objective, state.global_params, test)

    metrics = RoundMetrics(
        t=t,
        subset_size=len(plan.subset),
        subset_kl=plan.subset_kl,
        round_cost=round_server_cost,
        normalized_cost=normalized,
        cumulative_normalized_cost=state.ledger.cumulative_normalized,
        test_loss=loss,
        test_accuracy=accuracy,
        wall_ms=(time.perf_counter() - started) * 1000.0 if record_wall_time else 0.0,
        skipped=skipped,
        sync_events=events,
    )
    state.t = t
    state.history.rounds.append(metrics)
    logger.info(
        ROUND_COMPLETED.format(
            t=t, total=training.rounds, size=metrics.subset_size, kl=metrics.subset_kl,
            cost=normalized, acc=accuracy,
        )
    )
    return metrics


def _executor(threads: int):
    if threads == 1:
        return nullcontext(None)
    workers = threads if threads > 1 else min(32, os.cpu_count() or 1)
    return ThreadPoolExecutor(max_workers=workers) if workers > 1 else nullcontext(None)


def run_training(
    training: TrainingConfig,
    model: ModelConfig,
    clients: Sequence[ClientDataset],
    test: Optional[Dataset] = None,
    threads: int = 1,
    record_wall_time: bool = False,
) -> RunState:
    """
    Execute training.rounds rounds of the configured algorithm.

    Args:
        training (TrainingConfig): Training configuration with its seed resolved.
        model (ModelConfig): Model block with a resolved objective.
        clients (Sequence[ClientDataset]): Partitioned training data.
        test (Dataset, optional): Held-out evaluation set.
        threads (int): Client worker threads; 0 picks the CPU count, 1 runs inline.
        record_wall_time (bool): Measure round wall time.

    Returns:
        RunState: Final state with metrics history, ledger and W_g.
    """
    state = init_run(training, model, clients)
    with _executor(threads) as executor:
        for _ in range(training.rounds):
            run_round(state, training, model, test, executor, record_wall_time)
    state.history.final_params = state.global_params.values.copy()
    return state


def run_rounds_from_plans(
    plans: List[RoundPlan],
    global_params: ModelParams,
    clients: Dict[int, ClientDataset],
    objective: Objective,
    optimizer: OptimizerConfig,
    batch_size: int,
    seed: int = 0,
) -> List[ModelParams]:
    """Execute externally laid-out rounds back to back; returns W_g after each."""
    trajectory = []
    for plan in plans:
        global_params, _ = execute_round(plan, global_params, clients, objective, optimizer, batch_size, seed)
        trajectory.append(global_params)
    return trajectory
