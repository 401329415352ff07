import logging
import math
import time
from itertools import combinations
from typing import Dict, List, Sequence

import numpy as np

from fakerData.selectionFakerData import random_selection_problem
from modals.round_plan_modal import IntervalLevel
from seedings.seed import BENCH_STREAM, derive_rng
from services.comms_services import FLOOR_EPSILON, assign_intervals, reference_cost, round_cost
from services.dynacomm_services import (
    brute_force_select,
    dynacomm_select,
    genetic_select,
    kl_curve,
    random_select,
)
from utils.errors import CapacityError

logger = logging.getLogger(__name__)


def _timed(function, *args, **kwargs):
    started = time.perf_counter()
    result = function(*args, **kwargs)
    return result, (time.perf_counter() - started) * 1000.0


def selector_bench(
    sizes: Sequence[int],
    trials: int,
    seed: int,
    num_classes: int = 10,
    alpha: float = 0.1,
    target_fraction: float = 0.3,
    with_curves: bool = True,
) -> dict:
    """
    Compare the selectors on seeded random problems.

    Every row holds the KL, subset size and wall time of each selector. The brute-force
    columns are empty (with the error recorded) when a problem exceeds its capacity.

    Args:
        sizes (Sequence[int]): Candidate counts to benchmark.
        trials (int): Problems per candidate count.
        seed (int): Master seed of the benchmark.
        num_classes (int): Label-space size.
        alpha (float): Dirichlet concentration of candidate label mixes.
        target_fraction (float): Fraction drawn by the random selector.
        with_curves (bool): Also record kl_curve for every problem.

    Returns:
        dict: rows, curve rows and a summary with dominance rates and mean gaps.
    """
    rows: List[dict] = []
    curves: List[dict] = []
    for n in sizes:
        for trial in range(trials):
            problem = random_selection_problem(derive_rng(seed, BENCH_STREAM, n, trial), n, num_classes, alpha)
            row = {"n": n, "trial": trial, "brute_error": ""}
            try:
                result, elapsed = _timed(brute_force_select, problem)
                row.update(brute_kl=result.kl, brute_size=result.size, brute_ms=elapsed)
            except CapacityError as exc:
                row.update(brute_kl=math.nan, brute_size=0, brute_ms=math.nan, brute_error=exc.message)
            for name, function, args in (
                ("dynacomm", dynacomm_select, ()),
                ("genetic", genetic_select, ()),
                ("random", random_select, (target_fraction,)),
            ):
                result, elapsed = _timed(function, problem, *args)
                row.update({f"{name}_kl": result.kl, f"{name}_size": result.size, f"{name}_ms": elapsed})
            rows.append(row)

            if with_curves:
                for size, kl in kl_curve(problem, n):
                    curves.append({"n": n, "trial": trial, "size": size, "kl": kl})

    return {"rows": rows, "curves": curves, "summary": summarize_bench(rows)}


def summarize_bench(rows: Sequence[dict]) -> Dict[str, float]:
    """Dominance rates and mean KL gaps of the heuristics against brute force."""
    exact = [row for row in rows if not row["brute_error"]]
    summary: Dict[str, float] = {"rows": float(len(rows)), "rows_with_brute": float(len(exact))}
    for name in ("dynacomm", "genetic", "random"):
        comparable = [row for row in exact if math.isfinite(row[f"{name}_kl"]) and math.isfinite(row["brute_kl"])]
        dominated = sum(1 for row in exact if row["brute_kl"] <= row[f"{name}_kl"])
        summary[f"brute_le_{name}_rate"] = dominated / len(exact) if exact else math.nan
        summary[f"{name}_mean_gap"] = (
            float(np.mean([row[f"{name}_kl"] - row["brute_kl"] for row in comparable])) if comparable else math.nan
        )
        summary[f"{name}_mean_ms"] = float(np.mean([row[f"{name}_ms"] for row in rows])) if rows else math.nan
    summary["brute_mean_ms"] = float(np.mean([row["brute_ms"] for row in exact])) if exact else math.nan
    return summary


def cost_table(L: int = 250, actives: int = 10, high_fraction: float = 0.3, model_size: int = 1) -> List[dict]:
    """
    Normalised round cost of pure, mixed and high-only interval configurations.

    Pure "x": every active at level x. "FedAvg": one end-of-round sync. Mixed "x-y":
    floor(high_fraction * actives) clients at x and the rest at the longer level y.
    High-only "x*": only the high-frequency clients train and sync, at level x.

    Returns:
        List[dict]: Rows with configuration, high_clients and normalized_cost.
    """
    ids = list(range(actives))
    high_count = int(math.floor(high_fraction * actives + FLOOR_EPSILON))
    high_ids = ids[:high_count]
    denominator = reference_cost(L, model_size, actives)

    def normalized(members, subset, high, low) -> float:
        if not members:
            return 0.0
        _, server = round_cost(assign_intervals(members, subset, L, high, low), model_size)
        return server / denominator

    rows = []
    for level in IntervalLevel:
        rows.append({"configuration": level.value, "high_clients": actives,
                     "normalized_cost": normalized(ids, ids, level.updates, level.updates)})
    rows.append({"configuration": "FedAvg", "high_clients": 0, "normalized_cost": normalized(ids, [], L, L)})
    for high, low in combinations(list(IntervalLevel), 2):
        rows.append({"configuration": f"{high.value}-{low.value}", "high_clients": high_count,
                     "normalized_cost": normalized(ids, high_ids, high.updates, low.updates)})
    for level in IntervalLevel:
        rows.append({"configuration": f"{level.value}*", "high_clients": high_count,
                     "normalized_cost": normalized(high_ids, high_ids, level.updates, level.updates)})
    logger.debug("Cost table with %d configurations at L=%d", len(rows), L)
    return rows
