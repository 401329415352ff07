"""
Three-client quadratic equivalence between DynamicFL and FedSGD.

Clients 1 and 2 sync after every local step, client 3 once per k-step round; with
full-batch plain gradient steps the global parameter after r rounds equals
theta* + (1 - eta)^(k r) (theta_0 - theta*), the FedSGD value after k r steps.
"""

import logging
import time
from typing import Dict, List, Sequence

import numpy as np

from fakerData.scenarioFakerData import random_quadratic_scenario
from modals.client_dataset_modal import ClientDataset
from modals.model_params_modal import ModelParams
from modals.round_plan_modal import RoundPlan
from schemas.model_schema import Objective, OptimizerConfig
from schemas.theory_schema import QuadraticScenario
from seedings.seed import THEORY_STREAM, derive_rng
from services.comms_services import assign_intervals, sync_schedule
from services.datastats_services import empirical_distribution
from services.engine_services import run_rounds_from_plans

logger = logging.getLogger(__name__)

CLIENT_IDS = (1, 2, 3)
HIGH_FREQUENCY_IDS = (1, 2)
DEFAULT_ETAS = (0.1, 0.5, 0.9)
DEFAULT_KS = (1, 2, 5)
DEFAULT_RS = (1, 3, 10)
DEFAULT_SCENARIOS = 20
THEORY_TOLERANCE = 1e-10

_OBJECTIVE = Objective(kind="quadratic_mean", num_classes=1, feature_dim=1)


def closed_form(scenario: QuadraticScenario) -> float:
    """theta_r = theta* + (1 - eta)^(k r) (theta_0 - theta*)."""
    theta_star = scenario.theta_star
    return theta_star + (1.0 - scenario.eta) ** (scenario.k * scenario.r) * (scenario.theta0 - theta_star)


def _clients(scenario: QuadraticScenario) -> Dict[int, ClientDataset]:
    clients = {}
    for client_id, values in zip(CLIENT_IDS, scenario.observations):
        labels = np.zeros(len(values), dtype=np.int64)
        clients[client_id] = ClientDataset(
            client_id=client_id,
            features=np.asarray(values, dtype=np.float64).reshape(-1, 1),
            labels=labels,
            label_dist=empirical_distribution(labels, 1),
        )
    return clients


def _simulate(scenario: QuadraticScenario, rounds: int, L: int, subset: Sequence[int], high: int, low: int) -> List[float]:
    clients = _clients(scenario)
    assignment = assign_intervals(CLIENT_IDS, subset, L, high, low)
    plans = [
        RoundPlan(
            t=t,
            actives=CLIENT_IDS,
            subset=tuple(subset),
            assignment=assignment,
            participants=CLIENT_IDS,
            schedule=sync_schedule(assignment, CLIENT_IDS),
        )
        for t in range(1, rounds + 1)
    ]
    optimizer = OptimizerConfig(learning_rate=scenario.eta, momentum=0.0, weight_decay=0.0, schedule="constant")
    start = ModelParams.from_segments([("theta", np.array([scenario.theta0]))])
    full_batch = max(client.size for client in clients.values())
    trajectory = run_rounds_from_plans(plans, start, clients, _OBJECTIVE, optimizer, full_batch)
    return [float(params.values[0]) for params in trajectory]


def simulate_dynamicfl_quadratic(scenario: QuadraticScenario) -> List[float]:
    """
    Run the engine for r rounds of L = k updates: clients 1 and 2 at interval 1, client 3
    at interval k, full-batch gradients.

    Returns:
        List[float]: theta after every round.
    """
    return _simulate(scenario, scenario.r, scenario.k, HIGH_FREQUENCY_IDS, 1, scenario.k)


def simulate_fedsgd_quadratic(scenario: QuadraticScenario) -> List[float]:
    """
    k r single-step rounds where all three clients aggregate after every step.

    Returns:
        List[float]: theta after every system-wide step.
    """
    return _simulate(scenario, scenario.k * scenario.r, 1, CLIENT_IDS, 1, 1)


def check_scenario(scenario: QuadraticScenario) -> Dict[str, float]:
    """
    Deviations of one scenario: DynamicFL vs closed form, DynamicFL vs FedSGD at every
    k-th step, and the per-round contraction factor vs (1 - eta)^k.
    """
    dynamic = simulate_dynamicfl_quadratic(scenario)
    fedsgd = simulate_fedsgd_quadratic(scenario)
    theta_star = scenario.theta_star
    factor = (1.0 - scenario.eta) ** scenario.k

    closed_delta = abs(dynamic[-1] - closed_form(scenario))
    fedsgd_delta = max(
        abs(dynamic[round_index] - fedsgd[(round_index + 1) * scenario.k - 1])
        for round_index in range(scenario.r)
    )
    previous = scenario.theta0
    contraction_delta = 0.0
    for theta in dynamic:
        contraction_delta = max(contraction_delta, abs(abs(theta - theta_star) - factor * abs(previous - theta_star)))
        previous = theta
    return {"closed_form": closed_delta, "fedsgd": fedsgd_delta, "contraction": contraction_delta}


def run_theory_grid(
    seed: int = 0,
    etas: Sequence[float] = DEFAULT_ETAS,
    ks: Sequence[int] = DEFAULT_KS,
    rs: Sequence[int] = DEFAULT_RS,
    scenarios: int = DEFAULT_SCENARIOS,
    tolerance: float = THEORY_TOLERANCE,
) -> dict:
    """
    Check the equivalence over a grid of (eta, k, r) with random scenarios.

    Args:
        seed (int): Seed of the scenario generator.
        etas, ks, rs: Grid axes.
        scenarios (int): Random scenarios per grid point.
        tolerance (float): Largest accepted deviation.

    Returns:
        dict: passed flag, scenario count, worst deviations, the worst scenario and elapsed seconds.
    """
    started = time.perf_counter()
    rng = derive_rng(seed, THEORY_STREAM)
    worst = {"closed_form": 0.0, "fedsgd": 0.0, "contraction": 0.0}
    worst_scenario = None
    worst_total = -1.0
    count = 0

    for eta in etas:
        for k in ks:
            for r in rs:
                for _ in range(scenarios):
                    scenario = random_quadratic_scenario(rng, eta, k, r)
                    deltas = check_scenario(scenario)
                    count += 1
                    for key, value in deltas.items():
                        worst[key] = max(worst[key], value)
                    total = max(deltas["closed_form"], deltas["fedsgd"])
                    if total > worst_total:
                        worst_total, worst_scenario = total, scenario

    passed = worst["closed_form"] <= tolerance and worst["fedsgd"] <= tolerance
    logger.info("Theory grid: %d scenarios, worst closed-form %.3g, worst fedsgd %.3g", count, worst["closed_form"], worst["fedsgd"])
    return {
        "passed": passed,
        "scenarios": count,
        "max_delta": max(worst["closed_form"], worst["fedsgd"]),
        "max_closed_form_delta": worst["closed_form"],
        "max_fedsgd_delta": worst["fedsgd"],
        "max_contraction_delta": worst["contraction"],
        "tolerance": tolerance,
        "worst_scenario": worst_scenario.model_dump() if worst_scenario is not None else None,
        "elapsed_s": time.perf_counter() - started,
    }
