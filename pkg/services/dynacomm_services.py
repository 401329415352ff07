import logging
import math
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import numpy as np
from scipy.special import rel_entr

from config.config import settings
from modals.selection_modal import SelectionCell, SelectionProblem, SelectionResult
from seedings.seed import DYNACOMM_STREAM, GENETIC_STREAM, RANDOM_SELECT_STREAM, derive_rng
from services.datastats_services import kl_of_probs
from utils.errors import CapacityError, InfeasibleSelectionError, InputValidationError
from utils.message import BRUTE_FORCE_TOO_LARGE, SELECTION_INFEASIBLE, TARGET_FRACTION_RANGE

logger = logging.getLogger(__name__)

# Subsets per vectorised enumeration chunk
_ENUMERATION_CHUNK = 1 << 15
# Slack between vectorised and canonical KL values when shortlisting exact candidates
_SHORTLIST_SLACK = 1e-9


class SubsetScorer:
    """
    Canonical KL of candidate subsets against the global distribution.

    Member masses are summed in ascending candidate-index order, so every selector
    scores the same subset to the same float. Scores are memoised per subset.
    """

    def __init__(self, problem: SelectionProblem):
        self.problem = problem
        self.masses = np.array([candidate.dist.mass for candidate in problem.candidates]).reshape(
            problem.size, problem.global_dist.num_classes
        )
        self.target = problem.global_dist.probs
        self._cache: Dict[FrozenSet[int], float] = {}

    def kl(self, indices: Iterable[int]) -> float:
        key = frozenset(int(index) for index in indices)
        if key not in self._cache:
            self._cache[key] = self._score(sorted(key))
        return self._cache[key]

    def _score(self, ordered: List[int]) -> float:
        if not ordered:
            return math.inf
        mass = self.masses[ordered[0]].copy()
        for index in ordered[1:]:
            mass += self.masses[index]
        total = mass.sum()
        if total <= 0:
            return math.inf
        return kl_of_probs(mass / total, self.target)


def finalize_selection(problem: SelectionProblem, indices: Iterable[int], kl: float) -> SelectionResult:
    """
    Turn candidate indices into a SelectionResult, asserting budget feasibility.

    Raises:
        InfeasibleSelectionError: If a member exceeds its budget or the server cost exceeds tau_g.
    """
    indices = sorted(set(int(index) for index in indices))
    subset = tuple(sorted(problem.candidates[index].client_id for index in indices))
    if indices and not problem.is_feasible(indices):
        raise InfeasibleSelectionError(SELECTION_INFEASIBLE.format(subset=list(subset)))
    return SelectionResult(
        subset=subset,
        kl=kl if indices else math.inf,
        feasible=True,
        server_cost_if_adopted=problem.server_cost(indices),
    )


def _run_dp(problem: SelectionProblem, scorer: SubsetScorer) -> Tuple[SelectionCell, List[float]]:
    """
    Ensemble of shuffled DynaComm passes.

    Cell (i, j) holds the best known j-subset among the first i shuffled candidates; it
    inherits cell (i-1, j) and is replaced by extending cell (i-1, j-1) with candidate i
    only when that extension is affordable, has exactly j members and a strictly smaller KL.

    Returns:
        Tuple[SelectionCell, List[float]]: Best cell over all passes, and the best KL per
            cardinality 0..n taken from the last row of every pass.
    """
    n = problem.size
    rng = derive_rng(problem.seed, DYNACOMM_STREAM)
    best = SelectionCell()
    per_size = [math.inf] * (n + 1)

    for pass_index in range(problem.ens_times):
        order = rng.permutation(n)
        previous = [SelectionCell() for _ in range(n + 1)]
        for i in range(1, n + 1):
            candidate_index = int(order[i - 1])
            candidate = problem.candidates[candidate_index]
            current = [SelectionCell() for _ in range(n + 1)]
            for j in range(1, i + 1):
                cell = previous[j]
                if candidate.can_go_high:
                    tentative = previous[j - 1].clients | {candidate_index}
                    if len(tentative) == j and problem.server_cost(tentative) <= problem.server_budget:
                        kl = scorer.kl(tentative)
                        if kl < cell.kl:
                            cell = SelectionCell(kl, frozenset(tentative))
                current[j] = cell
                if cell.kl < best.kl:
                    best = cell
            previous = current

        for size in range(1, n + 1):
            per_size[size] = min(per_size[size], previous[size].kl)
        logger.debug("DynaComm pass %d: best kl %.6g", pass_index + 1, best.kl)

    return best, per_size


def dynacomm_select(problem: SelectionProblem) -> SelectionResult:
    """
    Select the high-frequency subset with the DynaComm ensemble dynamic program.

    Args:
        problem (SelectionProblem): Candidates, budgets and target distribution.

    Returns:
        SelectionResult: The best feasible subset over all passes, or the empty subset
            with kl = inf when no non-empty subset is affordable.
    """
    scorer = SubsetScorer(problem)
    best, _ = _run_dp(problem, scorer)
    return finalize_selection(problem, best.clients, best.kl)


def _check_capacity(problem: SelectionProblem) -> None:
    limit = settings.BRUTE_FORCE_MAX_CANDIDATES
    if problem.size > limit:
        raise CapacityError(BRUTE_FORCE_TOO_LARGE.format(limit=limit, count=problem.size))


def _enumerate_subsets(problem: SelectionProblem, scorer: SubsetScorer) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Vectorised pass over every non-empty subset bitmask.

    Returns the masks that pass a slightly loose budget check with their approximate
    KL and cardinality; exact checks happen on the shortlist only.
    """
    n = problem.size
    capable = np.array([candidate.can_go_high for candidate in problem.candidates], dtype=bool)
    high = np.array([candidate.high_cost for candidate in problem.candidates])
    low = np.array([candidate.low_cost for candidate in problem.candidates])
    low_total = low.sum()
    budget = problem.server_budget
    slack = _SHORTLIST_SLACK * max(abs(budget) if math.isfinite(budget) else 0.0, 1.0)
    incapable_mask = sum(1 << index for index in range(n) if not capable[index])
    shifts = np.arange(n, dtype=np.int64)

    kept_masks, kept_kl, kept_sizes = [], [], []
    for start in range(1, 1 << n, _ENUMERATION_CHUNK):
        masks = np.arange(start, min(start + _ENUMERATION_CHUNK, 1 << n), dtype=np.int64)
        masks = masks[(masks & incapable_mask) == 0]
        if masks.size == 0:
            continue
        bits = ((masks[:, None] >> shifts) & 1).astype(np.float64)
        costs = low_total + bits @ (high - low)
        affordable = costs <= budget + slack
        masks, bits = masks[affordable], bits[affordable]
        if masks.size == 0:
            continue
        mass = bits @ scorer.masses
        totals = mass.sum(axis=1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            kl = np.sum(rel_entr(mass / totals, scorer.target), axis=1)
        kl = np.where(totals[:, 0] > 0, kl, np.inf)
        kept_masks.append(masks)
        kept_kl.append(kl)
        kept_sizes.append(bits.sum(axis=1).astype(np.int64))

    if not kept_masks:
        empty = np.array([], dtype=np.int64)
        return empty, np.array([], dtype=np.float64), empty
    return np.concatenate(kept_masks), np.concatenate(kept_kl), np.concatenate(kept_sizes)


def _mask_indices(mask: int, n: int) -> List[int]:
    return [index for index in range(n) if (mask >> index) & 1]


def _exact_best(
    problem: SelectionProblem, scorer: SubsetScorer, masks: np.ndarray, approx_kl: np.ndarray
) -> Tuple[Optional[List[int]], float]:
    """
    Walk subsets in ascending approximate KL, scoring them canonically, until no remaining
    subset can beat the best exact score. Ties go to the smaller subset, then to the
    lexicographically smaller client ids.
    """
    finite = np.isfinite(approx_kl)
    masks, approx_kl = masks[finite], approx_kl[finite]
    best_key, best_indices = None, None
    for position in np.argsort(approx_kl, kind="stable"):
        if best_key is not None and approx_kl[position] > best_key[0] + _SHORTLIST_SLACK:
            break
        indices = _mask_indices(int(masks[position]), problem.size)
        if not problem.is_feasible(indices):
            continue
        kl = scorer.kl(indices)
        if not math.isfinite(kl):
            continue
        ids = tuple(sorted(problem.candidates[index].client_id for index in indices))
        key = (kl, len(indices), ids)
        if best_key is None or key < best_key:
            best_key, best_indices = key, indices
    if best_key is None:
        return None, math.inf
    return best_indices, best_key[0]


def brute_force_select(problem: SelectionProblem) -> SelectionResult:
    """
    Exhaustive minimum-KL feasible subset over the power set of the candidates.

    Raises:
        CapacityError: If there are more candidates than the configured limit (20 by default).
    """
    _check_capacity(problem)
    scorer = SubsetScorer(problem)
    masks, approx_kl, _ = _enumerate_subsets(problem, scorer)
    indices, kl = _exact_best(problem, scorer, masks, approx_kl)
    return finalize_selection(problem, indices or [], kl)


def genetic_select(
    problem: SelectionProblem,
    population: int = 50,
    max_iters: int = 200,
    mutation_prob: float = 0.01,
) -> SelectionResult:
    """
    Genetic-algorithm baseline over subset bitstrings.

    Fitness is the subset KL, with math.inf for empty or unaffordable subsets. Parents come
    from size-3 tournaments, children from uniform crossover plus per-bit mutation, and
    the fittest individual survives every generation unchanged.

    Args:
        problem (SelectionProblem): The selection problem; its seed drives the search.
        population (int): Individuals per generation.
        max_iters (int): Generations.
        mutation_prob (float): Per-bit flip probability.

    Returns:
        SelectionResult: The best feasible individual seen, or the empty subset.
    """
    n = problem.size
    if n == 0:
        return finalize_selection(problem, [], math.inf)
    scorer = SubsetScorer(problem)
    rng = derive_rng(problem.seed, GENETIC_STREAM)

    def fitness(individual: np.ndarray) -> float:
        indices = np.flatnonzero(individual).tolist()
        if not indices or not problem.is_feasible(indices):
            return math.inf
        return scorer.kl(indices)

    def tournament(scores: np.ndarray) -> int:
        contenders = rng.choice(population, size=3, replace=True)
        return int(contenders[np.argmin(scores[contenders])])

    # Mixed densities so sparse and dense subsets are both represented
    pool = rng.random((population, n)) < rng.random((population, 1))
    scores = np.array([fitness(individual) for individual in pool])
    best_index = int(np.argmin(scores))
    best_kl, best_individual = float(scores[best_index]), pool[best_index].copy()

    for _ in range(max_iters):
        children = [pool[int(np.argmin(scores))].copy()]
        while len(children) < population:
            first, second = pool[tournament(scores)], pool[tournament(scores)]
            child = np.where(rng.random(n) < 0.5, first, second)
            child ^= rng.random(n) < mutation_prob
            children.append(child)
        pool = np.array(children)
        scores = np.array([fitness(individual) for individual in pool])
        generation_best = int(np.argmin(scores))
        if scores[generation_best] < best_kl:
            best_kl, best_individual = float(scores[generation_best]), pool[generation_best].copy()

    if not math.isfinite(best_kl):
        return finalize_selection(problem, [], math.inf)
    logger.debug("Genetic search best kl %.6g after %d generations", best_kl, max_iters)
    return finalize_selection(problem, np.flatnonzero(best_individual).tolist(), best_kl)


def random_select(
    problem: SelectionProblem, target_fraction: float, seed: Optional[int] = None
) -> SelectionResult:
    """
    Random baseline that respects budgets.

    Draws floor(target_fraction * n) clients uniformly from those that can afford high
    frequency. Draws that break the server budget are redrawn a bounded number of times;
    after that the last draw is truncated until it fits.

    Args:
        problem (SelectionProblem): The selection problem.
        target_fraction (float): Share of candidates to select, in [0, 1].
        seed (int, optional): Seed of the draw; the problem's seed when omitted.

    Returns:
        SelectionResult: The drawn subset and its KL.
    """
    if not 0 <= target_fraction <= 1:
        raise InputValidationError(TARGET_FRACTION_RANGE)
    rng = derive_rng(problem.seed if seed is None else seed, RANDOM_SELECT_STREAM)
    pool = np.array([index for index, candidate in enumerate(problem.candidates) if candidate.can_go_high])
    size = min(int(math.floor(target_fraction * problem.size + 1e-9)), pool.size)
    if size == 0:
        return finalize_selection(problem, [], math.inf)

    draw: List[int] = []
    for _ in range(max(settings.RANDOM_SELECT_MAX_RETRIES, 1)):
        draw = rng.choice(pool, size=size, replace=False).tolist()
        if problem.is_feasible(draw):
            break
    else:
        while draw and not problem.is_feasible(draw):
            draw.pop()
        logger.debug("Random selection truncated to %d clients to fit the server budget", len(draw))

    scorer = SubsetScorer(problem)
    return finalize_selection(problem, draw, scorer.kl(draw))


def kl_curve(problem: SelectionProblem, max_size: int, backend: str = "auto") -> List[Tuple[int, float]]:
    """
    Best feasible KL at every exact cardinality 1..max_size.

    Args:
        problem (SelectionProblem): The selection problem.
        max_size (int): Largest cardinality reported.
        backend (str): brute (exact, capacity-limited), dynacomm (DP cells) or auto
            (brute when the candidate count allows it).

    Returns:
        List[Tuple[int, float]]: (size, best_kl) pairs; math.inf where no subset is feasible.

    Raises:
        CapacityError: If the brute backend is requested for too many candidates.
    """
    if backend == "auto":
        backend = "brute" if problem.size <= settings.BRUTE_FORCE_MAX_CANDIDATES else "dynacomm"
    scorer = SubsetScorer(problem)
    sizes = range(1, max_size + 1)

    if backend == "dynacomm":
        _, per_size = _run_dp(problem, scorer)
        return [(size, per_size[size] if size <= problem.size else math.inf) for size in sizes]

    _check_capacity(problem)
    masks, approx_kl, cardinality = _enumerate_subsets(problem, scorer)
    curve = []
    for size in sizes:
        chosen = cardinality == size
        _, kl = _exact_best(problem, scorer, masks[chosen], approx_kl[chosen])
        curve.append((size, kl))
    return curve


def run_selector(
    problem: SelectionProblem,
    method: str,
    target_fraction: float = 0.0,
    population: int = 50,
    max_iters: int = 200,
    mutation_prob: float = 0.01,
) -> SelectionResult:
    """Dispatch to the named selector."""
    if method == "dynacomm":
        return dynacomm_select(problem)
    if method == "brute":
        return brute_force_select(problem)
    if method == "genetic":
        return genetic_select(problem, population, max_iters, mutation_prob)
    if method == "random":
        return random_select(problem, target_fraction)
    raise InputValidationError(f"Unknown selection method {method!r}.")
