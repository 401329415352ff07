import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy.special import logsumexp

from modals.client_dataset_modal import Dataset
from modals.model_params_modal import ModelParams
from modals.optimizer_state_modal import OptimizerState
from schemas.model_schema import Objective, OptimizerConfig
from utils.errors import InputValidationError, NumericError
from utils.message import (
    BATCH_EMPTY,
    BATCH_SHAPE_MISMATCH,
    COSINE_NEEDS_HORIZON,
    GRAD_LENGTH_MISMATCH,
    NON_FINITE_LOSS,
    OBJECTIVE_MLP_HIDDEN,
    OBJECTIVE_QUADRATIC_DIM,
)

logger = logging.getLogger(__name__)

# Floor of the relative-error denominator in gradient_check
GRADIENT_CHECK_FLOOR = 1e-6


def resolve_objective(objective: Objective, dataset: Dataset) -> Objective:
    """
    Fill num_classes and feature_dim from the dataset where the config left them open.
    """
    feature_dim = objective.feature_dim or (1 if objective.kind == "quadratic_mean" else dataset.dims)
    if objective.kind == "quadratic_mean" and dataset.dims != 1:
        raise InputValidationError(OBJECTIVE_QUADRATIC_DIM)
    return objective.model_copy(
        update={"num_classes": objective.num_classes or dataset.num_classes, "feature_dim": feature_dim}
    )


def _shapes(objective: Objective):
    if objective.kind == "quadratic_mean":
        return (("theta", (1,)),)
    if objective.num_classes is None or objective.feature_dim is None:
        raise InputValidationError("Objective needs num_classes and feature_dim before use.")
    classes, dims = objective.num_classes, objective.feature_dim
    if objective.kind == "softmax":
        return (("weight", (classes, dims)), ("bias", (classes,)))
    if not objective.hidden:
        raise InputValidationError(OBJECTIVE_MLP_HIDDEN)
    hidden = objective.hidden
    return (
        ("hidden_weight", (hidden, dims)),
        ("hidden_bias", (hidden,)),
        ("output_weight", (classes, hidden)),
        ("output_bias", (classes,)),
    )


def init_params(objective: Objective, rng: Optional[np.random.Generator] = None) -> ModelParams:
    """
    Initial global parameters W_g^0.

    quadratic_mean and softmax start at zero. mlp layers draw from
    U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases alike.

    Args:
        objective (Objective): Resolved objective.
        rng (np.random.Generator, optional): Needed for mlp.

    Returns:
        ModelParams: Parameters with the objective's layout.
    """
    shapes = _shapes(objective)
    if objective.kind != "mlp":
        return ModelParams.from_segments([(name, np.zeros(shape)) for name, shape in shapes])

    if rng is None:
        rng = np.random.default_rng(0)
    fan_in = {"hidden_weight": objective.feature_dim, "hidden_bias": objective.feature_dim,
              "output_weight": objective.hidden, "output_bias": objective.hidden}
    segments = []
    for name, shape in shapes:
        bound = 1.0 / math.sqrt(fan_in[name])
        segments.append((name, rng.uniform(-bound, bound, size=shape)))
    return ModelParams.from_segments(segments)


def _check_batch(objective: Objective, params: ModelParams, batch: Dataset) -> None:
    if len(batch) == 0:
        raise InputValidationError(BATCH_EMPTY)
    expected = 1 if objective.kind == "quadratic_mean" else objective.feature_dim
    if batch.dims != expected:
        raise InputValidationError(BATCH_SHAPE_MISMATCH.format(cols=batch.dims, expected=expected))
    layout = tuple((name, tuple(shape)) for name, shape in _shapes(objective))
    if params.layout != layout:
        raise InputValidationError("Parameter layout does not match the objective.")


def _logits(objective: Objective, params: ModelParams, features: np.ndarray):
    """Class scores, plus the hidden activations for mlp."""
    if objective.kind == "softmax":
        return features @ params.segment("weight").T + params.segment("bias"), None
    hidden = np.tanh(features @ params.segment("hidden_weight").T + params.segment("hidden_bias"))
    return hidden @ params.segment("output_weight").T + params.segment("output_bias"), hidden


def loss_and_grad(objective: Objective, params: ModelParams, batch: Dataset) -> Tuple[float, np.ndarray]:
    """
    Mean loss over a batch and its gradient with respect to the flat parameters.

    quadratic_mean: loss = mean of (theta - z)^2 / 2, gradient theta - mean(z).
    softmax / mlp: mean cross-entropy of the softmax probabilities, backpropagated
    analytically (tanh hidden layer for mlp).

    Args:
        objective (Objective): Resolved objective.
        params (ModelParams): Current parameters.
        batch (Dataset): Non-empty batch.

    Returns:
        Tuple[float, np.ndarray]: (loss, flat gradient).

    Raises:
        InputValidationError: On an empty batch or mismatched shapes.
        NumericError: If the loss is not finite.
    """
    _check_batch(objective, params, batch)
    n = len(batch)

    if objective.kind == "quadratic_mean":
        theta = params.values[0]
        targets = batch.features[:, 0]
        loss = float(np.mean(0.5 * (theta - targets) ** 2))
        grad = np.array([theta - np.mean(targets)])
    else:
        logits, hidden = _logits(objective, params, batch.features)
        log_probs = logits - logsumexp(logits, axis=1, keepdims=True)
        rows = np.arange(n)
        loss = float(-np.mean(log_probs[rows, batch.labels]))

        delta = np.exp(log_probs)
        delta[rows, batch.labels] -= 1.0
        delta /= n
        if objective.kind == "softmax":
            grad = np.concatenate([(delta.T @ batch.features).ravel(), delta.sum(axis=0)])
        else:
            hidden_delta = (delta @ params.segment("output_weight")) * (1.0 - hidden ** 2)
            grad = np.concatenate(
                [
                    (hidden_delta.T @ batch.features).ravel(),
                    hidden_delta.sum(axis=0),
                    (delta.T @ hidden).ravel(),
                    delta.sum(axis=0),
                ]
            )

    if not math.isfinite(loss):
        raise NumericError(NON_FINITE_LOSS.format(loss=loss))
    return loss, grad


def learning_rate_at(config: OptimizerConfig, step: int, total_steps: Optional[int] = None) -> float:
    """
    Scheduled learning rate at a 0-based global step.

    cosine: eta * (1 + cos(pi * step / (N - 1))) / 2 over a horizon of N steps, so the
    last step N - 1 runs at 0 and later steps stay there. A one-step horizon keeps eta.
    """
    if config.schedule == "constant":
        return config.learning_rate
    horizon = config.total_steps or total_steps
    if not horizon or horizon <= 0:
        raise InputValidationError(COSINE_NEEDS_HORIZON)
    last_step = horizon - 1
    if last_step == 0:
        return config.learning_rate
    progress = min(step, last_step) / last_step
    return config.learning_rate * 0.5 * (1.0 + math.cos(math.pi * progress))


def sgd_step(
    params: ModelParams,
    grad: np.ndarray,
    state: OptimizerState,
    config: OptimizerConfig,
    step: int,
    total_steps: Optional[int] = None,
) -> ModelParams:
    """
    One SGD update W <- W - eta_t * d.

    Weight decay is added to the gradient, then the momentum buffer is updated
    (initialised to the gradient on the first step) and d is the buffer, or the
    Nesterov look-ahead of it when enabled.

    Args:
        params (ModelParams): Current parameters.
        grad (np.ndarray): Gradient of the same size.
        state (OptimizerState): Momentum state, updated in place.
        config (OptimizerConfig): Optimiser hyperparameters.
        step (int): 0-based global step driving the schedule.
        total_steps (int, optional): Schedule horizon when the config leaves it open.

    Returns:
        ModelParams: Updated parameters (a new object).
    """
    grad = np.asarray(grad, dtype=np.float64)
    if grad.size != params.size:
        raise InputValidationError(GRAD_LENGTH_MISMATCH.format(grad=grad.size, size=params.size))

    direction = grad + config.weight_decay * params.values if config.weight_decay else grad
    if config.momentum:
        if state.velocity is None:
            state.velocity = direction.copy()
        else:
            state.velocity = config.momentum * state.velocity + direction
        direction = direction + config.momentum * state.velocity if config.nesterov else state.velocity
    state.steps += 1

    rate = learning_rate_at(config, step, total_steps)
    return params.with_values(params.values - rate * direction)


def sample_batch(dataset: Dataset, batch_size: int, rng: np.random.Generator) -> Dataset:
    """
    Uniform minibatch of min(B, n) samples without replacement.

    Successive calls draw independently, so samples repeat across steps. B >= n
    returns the whole dataset in its original order.
    """
    n = len(dataset)
    if n == 0:
        raise InputValidationError(BATCH_EMPTY)
    if batch_size >= n:
        return dataset
    return dataset.subset(rng.choice(n, size=batch_size, replace=False))


def evaluate(objective: Objective, params: ModelParams, dataset: Dataset) -> Tuple[float, float]:
    """
    Full-dataset mean loss and top-1 accuracy.

    Returns:
        Tuple[float, float]: (loss, accuracy); accuracy is nan for quadratic_mean and
            both are nan for an empty dataset.
    """
    if len(dataset) == 0:
        return math.nan, math.nan
    if objective.kind == "quadratic_mean":
        loss = float(np.mean(0.5 * (params.values[0] - dataset.features[:, 0]) ** 2))
        return loss, math.nan

    logits, _ = _logits(objective, params, dataset.features)
    log_probs = logits - logsumexp(logits, axis=1, keepdims=True)
    loss = float(-np.mean(log_probs[np.arange(len(dataset)), dataset.labels]))
    accuracy = float(np.mean(np.argmax(logits, axis=1) == dataset.labels))
    return loss, accuracy


def gradient_check(objective: Objective, params: ModelParams, batch: Dataset, step: float = 1e-5) -> float:
    """
    Max relative error between the analytic gradient and central finite differences.

    Relative error per coordinate is |a - f| / max(|a| + |f|, 1e-6).
    """
    _, analytic = loss_and_grad(objective, params, batch)
    numeric = np.zeros_like(analytic)
    for index in range(params.size):
        shifted = params.values.copy()
        shifted[index] += step
        upper, _ = loss_and_grad(objective, params.with_values(shifted), batch)
        shifted[index] -= 2 * step
        lower, _ = loss_and_grad(objective, params.with_values(shifted), batch)
        numeric[index] = (upper - lower) / (2 * step)
    denominator = np.maximum(np.abs(analytic) + np.abs(numeric), GRADIENT_CHECK_FLOOR)
    return float(np.max(np.abs(analytic - numeric) / denominator))
