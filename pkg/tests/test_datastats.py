import math

import numpy as np
import pytest

from modals.client_dataset_modal import Dataset
from modals.label_distribution_modal import LabelDistribution
from schemas.partition_schema import PartitionSpec
from services.datastats_services import (
    empirical_distribution,
    joint_distribution,
    kl_divergence,
    load_csv_dataset,
    partition,
    partition_stats,
    synth_blobs,
    train_test_split,
)
from utils.errors import InputValidationError


def dist(probs, count):
    return LabelDistribution(probs=np.asarray(probs, dtype=float), count=count)


class TestEmpiricalDistribution:
    def test_balanced_labels(self):
        result = empirical_distribution([0, 0, 1, 1], 2)
        np.testing.assert_array_equal(result.probs, [0.5, 0.5])
        assert result.count == 4

    def test_single_sample(self):
        result = empirical_distribution([3], 4)
        np.testing.assert_array_equal(result.probs, [0, 0, 0, 1])
        assert result.count == 1

    def test_counts(self):
        result = empirical_distribution([0, 0, 0, 1, 2], 3)
        np.testing.assert_allclose(result.probs, [0.6, 0.2, 0.2])
        assert result.count == 5

    def test_empty_labels_give_empty_distribution(self):
        result = empirical_distribution([], 3)
        assert result.is_empty
        assert result.num_classes == 3

    def test_out_of_range_label_rejected(self):
        with pytest.raises(InputValidationError):
            empirical_distribution([0, 3], 3)


class TestJointDistribution:
    def test_single_member_is_identity(self):
        member = dist([0.2, 0.8], 5)
        result = joint_distribution([member])
        np.testing.assert_allclose(result.probs, member.probs)
        assert result.count == 5

    def test_symmetric_pair(self):
        result = joint_distribution([dist([1, 0], 10), dist([0, 1], 10)])
        np.testing.assert_allclose(result.probs, [0.5, 0.5])
        assert result.count == 20

    def test_count_weighted_mixture(self):
        result = joint_distribution([dist([1, 0, 0], 2), dist([0, 1, 0], 4), dist([0, 0, 1], 2)])
        np.testing.assert_allclose(result.probs, [0.25, 0.5, 0.25])
        assert result.count == 8

    def test_mismatched_classes_rejected(self):
        with pytest.raises(InputValidationError):
            joint_distribution([dist([1, 0], 1), dist([1, 0, 0], 1)])

    def test_all_empty_rejected(self):
        with pytest.raises(InputValidationError):
            joint_distribution([LabelDistribution.empty(2), LabelDistribution.empty(2)])

    def test_empty_members_are_ignored(self):
        result = joint_distribution([LabelDistribution.empty(2), dist([0.25, 0.75], 4)])
        np.testing.assert_allclose(result.probs, [0.25, 0.75])


class TestKlDivergence:
    def test_identical_is_zero(self):
        p = dist([0.3, 0.7], 10)
        assert kl_divergence(p, p) == 0.0

    def test_point_mass_against_uniform(self):
        assert kl_divergence(dist([1, 0], 1), dist([0.5, 0.5], 2)) == pytest.approx(math.log(2), abs=1e-12)

    def test_direct_formula(self):
        expected = 0.6 * math.log(1.2) + 0.4 * math.log(0.8)
        value = kl_divergence(dist([0.6, 0.4], 5), dist([0.5, 0.5], 2))
        assert value == pytest.approx(expected, abs=1e-12)
        assert value == pytest.approx(0.020136, abs=1e-6)

    def test_missing_support_is_infinite(self):
        assert kl_divergence(dist([0.5, 0.5], 2), dist([1, 0], 1)) == math.inf

    def test_mismatched_classes_rejected(self):
        with pytest.raises(InputValidationError):
            kl_divergence(dist([1, 0], 1), dist([1, 0, 0], 1))

    def test_empty_operand_rejected(self):
        with pytest.raises(InputValidationError):
            kl_divergence(LabelDistribution.empty(2), dist([1, 0], 1))

    def test_non_negative_and_zero_only_for_equal(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            p = dist(rng.dirichlet(np.ones(5)), 10)
            q = dist(rng.dirichlet(np.ones(5)), 10)
            value = kl_divergence(p, q)
            assert value >= 0.0
            if not np.allclose(p.probs, q.probs, atol=1e-12):
                assert value > 1e-12


class TestSynthBlobs:
    def test_sizes_and_histogram(self):
        data = synth_blobs(2, 2, 50, 0.5, seed=1)
        assert len(data) == 100
        np.testing.assert_array_equal(np.bincount(data.labels), [50, 50])

    def test_zero_spread_puts_points_on_centres(self):
        data = synth_blobs(3, 5, 4, 0.0, seed=1)
        for label in range(3):
            rows = data.features[data.labels == label]
            assert np.all(rows == rows[0])
            np.testing.assert_array_equal(rows[0], np.eye(3, 5)[label])

    def test_random_centres_when_dims_are_few(self):
        data = synth_blobs(5, 2, 3, 0.0, seed=2)
        centres = np.array([data.features[data.labels == label][0] for label in range(5)])
        np.testing.assert_allclose(np.linalg.norm(centres, axis=1), 1.0)
        assert len({tuple(row) for row in centres}) == 5

    def test_deterministic(self):
        first = synth_blobs(4, 3, 20, 0.3, seed=11)
        second = synth_blobs(4, 3, 20, 0.3, seed=11)
        np.testing.assert_array_equal(first.features, second.features)
        np.testing.assert_array_equal(first.labels, second.labels)


class TestPartition:
    @staticmethod
    def dataset(num_classes, per_class):
        labels = np.repeat(np.arange(num_classes), per_class)
        return Dataset(np.arange(labels.size, dtype=float).reshape(-1, 1), labels, num_classes)

    def test_two_clients_one_class_each(self):
        clients = partition(self.dataset(2, 30), PartitionSpec(mode="balanced_k", K=1, num_clients=2, seed=3))
        assert [client.size for client in clients] == [30, 30]
        assert sorted(len(set(client.labels.tolist())) for client in clients) == [1, 1]
        assert {int(client.labels[0]) for client in clients} == {0, 1}

    def test_ten_clients_two_classes(self):
        clients = partition(self.dataset(10, 100), PartitionSpec(mode="balanced_k", K=2, num_clients=10, seed=5))
        for client in clients:
            assert client.size == 100
            assert len(set(client.labels.tolist())) == 2

    def test_sizes_within_one_sample(self):
        clients = partition(self.dataset(3, 7), PartitionSpec(mode="balanced_k", K=1, num_clients=6, seed=0))
        sizes = [client.size for client in clients]
        assert max(sizes) - min(sizes) <= 1
        assert sum(sizes) == 21

    def test_k_larger_than_classes_rejected(self):
        with pytest.raises(InputValidationError):
            partition(self.dataset(2, 10), PartitionSpec(mode="balanced_k", K=3, num_clients=2, seed=0))

    def test_uneven_supply_rejected(self):
        labels = np.array([0] * 50 + [1] * 10)
        data = Dataset(np.zeros((60, 1)), labels, 2)
        with pytest.raises(InputValidationError):
            partition(data, PartitionSpec(mode="balanced_k", K=1, num_clients=2, seed=0))

    def test_class_with_fewer_samples_than_holders_rejected(self):
        data = self.dataset(2, 3)
        with pytest.raises(InputValidationError, match="fewer than K classes"):
            partition(data, PartitionSpec(mode="balanced_k", K=2, num_clients=4, seed=0))

    @pytest.mark.parametrize("seed", range(5))
    def test_every_client_holds_exactly_k_classes(self, seed):
        clients = partition(self.dataset(5, 6), PartitionSpec(mode="balanced_k", K=3, num_clients=10, seed=seed))
        for client in clients:
            assert len(set(client.labels.tolist())) == 3

    @pytest.mark.parametrize("alpha", [0.05, 0.5, 10.0])
    def test_dirichlet_conserves_samples(self, alpha):
        data = self.dataset(5, 40)
        clients = partition(data, PartitionSpec(mode="dirichlet", alpha=alpha, num_clients=8, seed=9))
        totals = sum(np.bincount(client.labels, minlength=5) for client in clients)
        np.testing.assert_array_equal(totals, np.full(5, 40))
        indices = np.sort(np.concatenate([client.features[:, 0] for client in clients]))
        np.testing.assert_array_equal(indices, np.arange(200, dtype=float))

    def test_joint_of_clients_equals_global(self):
        data = self.dataset(4, 25)
        clients = partition(data, PartitionSpec(mode="dirichlet", alpha=0.3, num_clients=6, seed=1))
        joint = joint_distribution([client.label_dist for client in clients])
        np.testing.assert_allclose(joint.probs, empirical_distribution(data.labels, 4).probs, atol=1e-9)

    def test_deterministic(self):
        spec = PartitionSpec(mode="dirichlet", alpha=0.5, num_clients=5, seed=42)
        first = partition(self.dataset(3, 20), spec)
        second = partition(self.dataset(3, 20), spec)
        for a, b in zip(first, second):
            np.testing.assert_array_equal(a.labels, b.labels)
            np.testing.assert_array_equal(a.features, b.features)


def test_train_test_split_is_stratified():
    data = synth_blobs(4, 3, 50, 0.1, seed=0)
    train, test = train_test_split(data, 0.2, seed=0)
    np.testing.assert_array_equal(np.bincount(test.labels), [10, 10, 10, 10])
    np.testing.assert_array_equal(np.bincount(train.labels), [40, 40, 40, 40])


def test_load_csv_dataset(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("x1,x2,label\n0.5,1.0,0\n-1.5,2.0,2\n3.0,0.0,1\n")
    data = load_csv_dataset(path)
    assert len(data) == 3
    assert data.num_classes == 3
    np.testing.assert_array_equal(data.labels, [0, 2, 1])
    np.testing.assert_allclose(data.features[1], [-1.5, 2.0])


def test_load_csv_dataset_rejects_bad_rows(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,label\n0.5,zero\n")
    with pytest.raises(InputValidationError):
        load_csv_dataset(path)


def test_partition_stats_reports_histograms():
    data = TestPartition.dataset(2, 10)
    clients = partition(data, PartitionSpec(mode="balanced_k", K=1, num_clients=2, seed=0))
    global_dist = joint_distribution([client.label_dist for client in clients])
    rows = partition_stats(clients, global_dist)
    assert [row["count"] for row in rows] == [10, 10]
    for row in rows:
        assert sorted(row["histogram"]) == [0, 10]
        assert row["kl_to_global"] == pytest.approx(math.log(2))
