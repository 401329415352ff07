import math

import numpy as np
import pytest

from modals.budget_modal import BudgetMode
from modals.round_plan_modal import INTERVAL_UPDATES, IntervalLevel
from services.comms_services import (
    active_count,
    assign_frequencies,
    client_cost,
    make_budgets,
    normalized_cost,
    round_cost,
    sync_points,
    sync_schedule,
)
from services.engine_services import compute_L
from utils.errors import InputValidationError


def test_interval_levels_map_to_update_counts():
    assert [INTERVAL_UPDATES[level] for level in IntervalLevel] == [1, 4, 16, 32, 64, 128, 256]
    assert IntervalLevel("d").updates == 32


class TestSyncPoints:
    def test_every_step(self):
        assert sync_points(8, 1) == list(range(1, 9))

    def test_interval_equal_to_L(self):
        assert sync_points(8, 8) == [8]

    def test_final_update_always_included(self):
        points = sync_points(250, 4)
        assert points[:3] == [4, 8, 12]
        assert points[-2:] == [248, 250]
        assert len(points) == 63

    def test_interval_longer_than_L(self):
        assert sync_points(250, 256) == [250]

    def test_non_positive_rejected(self):
        with pytest.raises(InputValidationError):
            sync_points(0, 1)


class TestCosts:
    def test_client_cost(self):
        assert client_cost(10, 4) == 80
        assert client_cost(10, 0) == 0
        assert client_cost(62006, 250) == 31_003_000

    def test_round_cost_two_clients(self):
        assignment = assign_frequencies([1, 2], [], 5, IntervalLevel.a, IntervalLevel.a)
        per_client, total = round_cost(assignment, 7)
        assert per_client == {1: 70.0, 2: 70.0}
        assert total == 140.0

    def test_round_cost_mixed_frequencies(self):
        # Interval 4 with L = 5 syncs at {4, 5}
        assignment = assign_frequencies([1, 2], [2], 5, IntervalLevel.a, IntervalLevel.b)
        per_client, _ = round_cost(assignment, 7)
        assert per_client[2] == 70.0
        assert per_client[1] == client_cost(7, 2)

    def test_uniform_frequencies_scale_with_clients(self):
        assignment = assign_frequencies(list(range(6)), list(range(6)), 16, IntervalLevel.b, IntervalLevel.b)
        _, total = round_cost(assignment, 3)
        assert total == 6 * client_cost(3, 4)


class TestNormalizedCost:
    L = 250
    ACTIVES = 10

    def normalized_for(self, high, low, subset_size=None):
        actives = list(range(self.ACTIVES))
        subset = actives if subset_size is None else actives[:subset_size]
        assignment = assign_frequencies(actives, subset, self.L, high, low)
        _, total = round_cost(assignment, 1)
        return normalized_cost([total], self.L, 1, self.ACTIVES)[0]

    def test_L_from_local_epochs(self):
        assert compute_L([500] * 100, 5, 10) == self.L

    @pytest.mark.parametrize(
        "level, expected",
        [("a", 1.0), ("b", 0.252), ("c", 0.064), ("d", 0.032)],
    )
    def test_pure_interval_configurations(self, level, expected):
        assert self.normalized_for(IntervalLevel(level), IntervalLevel(level)) == pytest.approx(expected, abs=0.005)

    def test_all_interval_one_is_exactly_one(self):
        assert self.normalized_for(IntervalLevel.a, IntervalLevel.a) == 1.0

    def test_single_end_of_round_sync(self):
        assert self.normalized_for(IntervalLevel.g, IntervalLevel.g) == pytest.approx(0.004, abs=1e-12)

    def test_all_high_dominates_mixed(self):
        mixed = self.normalized_for(IntervalLevel.a, IntervalLevel.g, subset_size=3)
        assert mixed < self.normalized_for(IntervalLevel.a, IntervalLevel.a)
        assert mixed == pytest.approx((3 * 250 + 7 * 1) / 2500)


class TestAssignFrequencies:
    def test_all_high(self):
        assignment = assign_frequencies([1, 2, 3], [1, 2, 3], 250, IntervalLevel.a, IntervalLevel.g)
        assert {entry.nu for entry in assignment.clients.values()} == {250}

    def test_all_low(self):
        assignment = assign_frequencies([1, 2, 3], [], 250, IntervalLevel.a, IntervalLevel.g)
        assert {entry.nu for entry in assignment.clients.values()} == {1}

    def test_mixed(self):
        assignment = assign_frequencies([1, 2, 3], [2], 250, IntervalLevel.a, IntervalLevel.g)
        assert assignment.nu_of(2) == 250
        assert assignment.nu_of(1) == assignment.nu_of(3) == 1
        assert assignment.interval_of(1) == 256
        assert assignment.nu_high == 250 and assignment.nu_low == 1

    def test_subset_outside_actives_rejected(self):
        with pytest.raises(InputValidationError):
            assign_frequencies([1, 2], [3], 10, IntervalLevel.a, IntervalLevel.g)

    def test_schedule_includes_everyone_at_L(self):
        assignment = assign_frequencies([1, 2, 3], [1], 8, IntervalLevel.b, IntervalLevel.g)
        schedule = sync_schedule(assignment, [1, 2, 3])
        assert schedule == {4: (1,), 8: (1, 2, 3)}


class TestMakeBudgets:
    def test_fix_mode_capable_count(self):
        budgets = make_budgets(BudgetMode.fix, 0.3, 100, 10, 250, IntervalLevel.a, IntervalLevel.g, seed=1)
        assert len(budgets.high_capable) == 30
        assert budgets.server_budget == math.inf
        for client_id, budget in budgets.client_budgets.items():
            if client_id in budgets.high_capable:
                assert budget >= budgets.high_round_cost
            else:
                assert budgets.low_round_cost <= budget < budgets.high_round_cost

    def test_dynamic_full_beta_admits_everyone(self):
        budgets = make_budgets(
            BudgetMode.dynamic, 1.0, 100, 10, 250, IntervalLevel.a, IntervalLevel.g, seed=1, active_fraction=0.1
        )
        assert all(budget >= budgets.high_round_cost for budget in budgets.client_budgets.values())
        assert budgets.server_budget == 10 * budgets.high_round_cost

    def test_dynamic_partial_beta(self):
        budgets = make_budgets(
            BudgetMode.dynamic, 0.6, 100, 10, 250, IntervalLevel.a, IntervalLevel.g, seed=1, active_fraction=0.1
        )
        assert budgets.server_budget == 6 * budgets.high_round_cost + 4 * budgets.low_round_cost

    @pytest.mark.parametrize("seed", range(5))
    def test_invariants_hold_for_any_seed(self, seed):
        budgets = make_budgets(BudgetMode.fix, 0.6, 37, 5, 40, IntervalLevel.b, IntervalLevel.f, seed=seed)
        assert len(budgets.high_capable) == math.floor(0.6 * 37)
        assert set(budgets.client_budgets) == set(range(37))

    def test_fix_mode_expected_capable_actives(self):
        hits = []
        for seed in range(300):
            budgets = make_budgets(BudgetMode.fix, 0.3, 100, 1, 250, IntervalLevel.a, IntervalLevel.g, seed=seed)
            actives = np.random.default_rng(seed).choice(100, size=10, replace=False)
            hits.append(sum(int(client_id) in budgets.high_capable for client_id in actives))
        assert np.mean(hits) == pytest.approx(3.0, abs=0.3)

    def test_beta_out_of_range_rejected(self):
        with pytest.raises(InputValidationError):
            make_budgets(BudgetMode.fix, 0.0, 10, 1, 10, IntervalLevel.a, IntervalLevel.g, seed=0)


def test_active_count():
    assert active_count(0.1, 100) == 10
    assert active_count(0.1, 5) == 1
    assert active_count(0.3, 10) == 3
