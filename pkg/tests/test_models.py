import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.stats import chisquare

from modals.client_dataset_modal import Dataset
from modals.model_params_modal import ModelParams
from modals.optimizer_state_modal import OptimizerState
from schemas.model_schema import Objective, OptimizerConfig
from services.model_services import (
    evaluate,
    gradient_check,
    init_params,
    learning_rate_at,
    loss_and_grad,
    resolve_objective,
    sample_batch,
    sgd_step,
)
from utils.errors import InputValidationError, NumericError

QUADRATIC = Objective(kind="quadratic_mean", num_classes=1, feature_dim=1)


def scalar(value):
    return ModelParams.from_segments([("theta", np.array([value]))])


def scalar_batch(values):
    values = np.asarray(values, dtype=float)
    return Dataset(values.reshape(-1, 1), np.zeros(values.size), 1)


def random_batch(rng, rows, dims, classes):
    return Dataset(rng.normal(size=(rows, dims)), rng.integers(0, classes, size=rows), classes)


def constant_sgd(learning_rate, momentum=0.0, **extra):
    return OptimizerConfig(learning_rate=learning_rate, momentum=momentum, schedule="constant", **extra)


class TestGradientCheck:
    @pytest.mark.parametrize("instance", range(20))
    def test_quadratic(self, instance):
        rng = np.random.default_rng(instance)
        batch = scalar_batch(rng.normal(size=6))
        assert gradient_check(QUADRATIC, scalar(rng.normal()), batch) < 1e-4

    @pytest.mark.parametrize("instance", range(20))
    def test_softmax(self, instance):
        rng = np.random.default_rng(100 + instance)
        objective = Objective(kind="softmax", num_classes=4, feature_dim=3)
        params = init_params(objective)
        params = params.with_values(rng.normal(scale=0.5, size=params.size))
        assert gradient_check(objective, params, random_batch(rng, 8, 3, 4)) < 1e-4

    @pytest.mark.parametrize("instance", range(20))
    def test_mlp(self, instance):
        rng = np.random.default_rng(200 + instance)
        objective = Objective(kind="mlp", num_classes=3, feature_dim=4, hidden=5)
        params = init_params(objective, rng)
        assert gradient_check(objective, params, random_batch(rng, 8, 4, 3)) < 1e-4


class TestLossAndGrad:
    def test_quadratic_closed_form(self):
        loss, grad = loss_and_grad(QUADRATIC, scalar(1.0), scalar_batch([0.0, 2.0, 4.0]))
        assert loss == pytest.approx((0.5 + 0.5 + 4.5) / 3)
        np.testing.assert_allclose(grad, [-1.0])

    def test_softmax_at_zero_is_log_classes(self):
        objective = Objective(kind="softmax", num_classes=5, feature_dim=2)
        rng = np.random.default_rng(0)
        loss, _ = loss_and_grad(objective, init_params(objective), random_batch(rng, 10, 2, 5))
        assert loss == pytest.approx(math.log(5))

    def test_empty_batch_rejected(self):
        with pytest.raises(InputValidationError):
            loss_and_grad(QUADRATIC, scalar(0.0), scalar_batch([]))

    def test_wrong_width_rejected(self):
        objective = Objective(kind="softmax", num_classes=2, feature_dim=3)
        batch = random_batch(np.random.default_rng(0), 4, 2, 2)
        with pytest.raises(InputValidationError):
            loss_and_grad(objective, init_params(objective), batch)

    def test_non_finite_loss_raises(self):
        with pytest.raises(NumericError):
            loss_and_grad(QUADRATIC, scalar(0.0), scalar_batch([np.inf]))


class TestSgdStep:
    def test_plain_step(self):
        updated = sgd_step(scalar(1.0), np.array([0.5]), OptimizerState(), constant_sgd(0.1), step=0)
        assert updated.values[0] == pytest.approx(0.95)

    def test_zero_learning_rate_freezes(self):
        params = scalar(2.5)
        updated = sgd_step(params, np.array([3.0]), OptimizerState(), constant_sgd(0.0), step=0)
        assert updated.values[0] == 2.5

    def test_momentum_accumulates(self):
        state = OptimizerState()
        config = constant_sgd(0.1, momentum=0.9)
        params = sgd_step(scalar(0.0), np.array([1.0]), state, config, step=0)
        assert params.values[0] == pytest.approx(-0.1)
        params = sgd_step(params, np.array([1.0]), state, config, step=1)
        assert params.values[0] == pytest.approx(-0.1 - 0.1 * 1.9)
        assert state.steps == 2

    def test_nesterov_looks_ahead(self):
        config = constant_sgd(0.1, momentum=0.5, nesterov=True)
        params = sgd_step(scalar(0.0), np.array([1.0]), OptimizerState(), config, step=0)
        assert params.values[0] == pytest.approx(-0.1 * 1.5)

    def test_weight_decay(self):
        updated = sgd_step(scalar(1.0), np.array([0.0]), OptimizerState(), constant_sgd(0.1, weight_decay=0.1), 0)
        assert updated.values[0] == pytest.approx(0.99)

    def test_does_not_mutate_input(self):
        params = scalar(1.0)
        sgd_step(params, np.array([1.0]), OptimizerState(), constant_sgd(0.1), step=0)
        assert params.values[0] == 1.0

    def test_gradient_length_mismatch(self):
        with pytest.raises(InputValidationError):
            sgd_step(scalar(1.0), np.array([1.0, 2.0]), OptimizerState(), constant_sgd(0.1), step=0)


class TestLearningRate:
    def test_constant(self):
        assert learning_rate_at(constant_sgd(0.3), step=500) == 0.3

    def test_cosine_endpoints(self):
        config = OptimizerConfig(learning_rate=0.2, schedule="cosine", total_steps=101)
        assert learning_rate_at(config, 0) == pytest.approx(0.2)
        assert learning_rate_at(config, 50) == pytest.approx(0.1)
        assert learning_rate_at(config, 100) == pytest.approx(0.0, abs=1e-15)
        assert learning_rate_at(config, 150) == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.parametrize("horizon", [2, 3, 8, 40, 250])
    def test_cosine_last_executed_step_is_annealed(self, horizon):
        config = OptimizerConfig(learning_rate=0.2, schedule="cosine")
        assert learning_rate_at(config, horizon - 1, total_steps=horizon) <= 1e-3 * 0.2

    def test_cosine_single_step_keeps_rate(self):
        config = OptimizerConfig(learning_rate=0.2, schedule="cosine", total_steps=1)
        assert learning_rate_at(config, 0) == 0.2

    def test_cosine_uses_fallback_horizon(self):
        config = OptimizerConfig(learning_rate=0.2, schedule="cosine")
        assert learning_rate_at(config, 10, total_steps=21) == pytest.approx(0.1)

    def test_cosine_without_horizon_rejected(self):
        with pytest.raises(InputValidationError):
            learning_rate_at(OptimizerConfig(schedule="cosine"), 0)


class TestObjectives:
    def test_resolve_from_dataset(self):
        data = random_batch(np.random.default_rng(0), 5, 4, 3)
        resolved = resolve_objective(Objective(), data)
        assert (resolved.num_classes, resolved.feature_dim) == (3, 4)

    def test_quadratic_needs_scalar_data(self):
        data = random_batch(np.random.default_rng(0), 5, 2, 2)
        with pytest.raises(InputValidationError):
            resolve_objective(Objective(kind="quadratic_mean"), data)

    def test_mlp_requires_hidden(self):
        with pytest.raises(ValidationError):
            Objective(kind="mlp")

    def test_quadratic_rejects_wide_features(self):
        with pytest.raises(ValidationError):
            Objective(kind="quadratic_mean", feature_dim=2)

    def test_mlp_init_bounds(self):
        objective = Objective(kind="mlp", num_classes=3, feature_dim=16, hidden=4)
        params = init_params(objective, np.random.default_rng(1))
        assert [name for name, _ in params.layout] == [
            "hidden_weight", "hidden_bias", "output_weight", "output_bias",
        ]
        assert np.all(np.abs(params.segment("hidden_weight")) <= 0.25)
        assert np.all(np.abs(params.segment("output_bias")) <= 0.5)

    def test_softmax_starts_at_zero(self):
        params = init_params(Objective(kind="softmax", num_classes=3, feature_dim=2))
        assert params.size == 9
        assert not params.values.any()


class TestBatchesAndEvaluation:
    def test_sample_batch_size(self):
        data = random_batch(np.random.default_rng(0), 30, 2, 3)
        batch = sample_batch(data, 10, np.random.default_rng(1))
        assert len(batch) == 10
        assert len({tuple(row) for row in batch.features}) == 10

    def test_sample_batch_is_uniform(self):
        data = Dataset(np.arange(20, dtype=float).reshape(-1, 1), np.zeros(20), 1)
        rng = np.random.default_rng(3)
        counts = np.zeros(20)
        for _ in range(2000):
            counts[sample_batch(data, 5, rng).features[:, 0].astype(int)] += 1
        assert chisquare(counts).pvalue > 1e-3

    def test_large_batch_returns_everything(self):
        data = random_batch(np.random.default_rng(0), 5, 2, 3)
        assert sample_batch(data, 10, np.random.default_rng(1)) is data

    def test_empty_dataset_rejected(self):
        with pytest.raises(InputValidationError):
            sample_batch(scalar_batch([]), 4, np.random.default_rng(0))

    def test_evaluate_softmax(self):
        objective = Objective(kind="softmax", num_classes=2, feature_dim=1)
        params = ModelParams.from_segments([("weight", np.array([[-1.0], [1.0]])), ("bias", np.zeros(2))])
        data = Dataset(np.array([[-2.0], [3.0], [1.0]]), np.array([0, 1, 0]), 2)
        loss, accuracy = evaluate(objective, params, data)
        assert accuracy == pytest.approx(2 / 3)
        assert loss > 0

    def test_evaluate_quadratic_has_no_accuracy(self):
        loss, accuracy = evaluate(QUADRATIC, scalar(1.0), scalar_batch([1.0, 3.0]))
        assert loss == pytest.approx(1.0)
        assert math.isnan(accuracy)

    def test_evaluate_empty(self):
        loss, accuracy = evaluate(QUADRATIC, scalar(1.0), scalar_batch([]))
        assert math.isnan(loss) and math.isnan(accuracy)
