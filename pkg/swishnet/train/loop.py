"""Mini-batch training, evaluation and post-training inspection."""
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from pydantic import BaseModel
from tqdm import tqdm

from ..core.error_codes import ErrorCode, get_error_message
from ..core.exceptions import ConfigurationError, DivergenceError, dimension_mismatch
from ..core.settings import settings
from ..data import LabeledDataset, plan_batches
from ..logger import logger
from ..nn import Activation, Conv2D, Model, sparse_ce_loss
from ..optim import (
    AdamState,
    Decision,
    EarlyStopping,
    SgdMomentumState,
    adam_step,
    early_stopping_update,
    sgd_momentum_step,
)
from ..rng import derive_seed
from ..tensor import Tensor, argmax_rows
from .config import EpochMetrics, OptimizerConfig, OptimizerKind, TrainConfig

EpochCallback = Callable[[EpochMetrics], None]


@dataclass
class TrainResult:
    metrics: list[EpochMetrics]
    model: Model
    stopped_early_at: int | None = None
    best_epoch: int | None = None
    steps: int = 0
    early_stopping: EarlyStopping | None = field(default=None, repr=False)

    @property
    def final(self) -> EpochMetrics:
        return self.metrics[-1]


def make_optimizer(config: OptimizerConfig) -> tuple[SgdMomentumState | AdamState, Callable]:
    lr = config.resolved_learning_rate
    if config.kind is OptimizerKind.SGD_MOMENTUM:
        return SgdMomentumState(learning_rate=lr, momentum=config.momentum), sgd_momentum_step
    return (
        AdamState(learning_rate=lr, beta1=config.beta1, beta2=config.beta2, epsilon=config.epsilon),
        adam_step,
    )


def check_compatible(model: Model, dataset: LabeledDataset) -> None:
    if dataset.class_count != model.class_count:
        raise ConfigurationError(
            get_error_message(ErrorCode.CLASS_COUNT_MISMATCH, dataset=dataset.class_count, model=model.class_count),
            error_code=ErrorCode.CLASS_COUNT_MISMATCH,
        )
    if dataset.sample_shape != model.input_shape:
        raise dimension_mismatch(f"{model.name} input", dataset.sample_shape, model.input_shape)


def evaluate(model: Model, dataset: LabeledDataset, batch_size: int = 256) -> tuple[float, float]:
    """Accuracy and mean cross-entropy over the whole dataset."""
    check_compatible(model, dataset)
    n = len(dataset)
    if n == 0:
        return 0.0, 0.0
    correct = 0
    loss_sum = 0.0
    for start in range(0, n, batch_size):
        x = dataset.images[start : start + batch_size]
        y = dataset.labels[start : start + batch_size]
        probs = model.forward(x)
        correct += int(np.sum(np.asarray(argmax_rows(probs)) == y))
        loss_sum += sparse_ce_loss(probs, y) * len(y)
    return correct / n, loss_sum / n


def train_model(
    model: Model,
    train_set: LabeledDataset,
    test_set: LabeledDataset,
    config: TrainConfig,
    *,
    on_epoch: EpochCallback | None = None,
    label: str | None = None,
) -> TrainResult:
    """Train for ``config.epochs`` epochs, evaluating both splits after each one.

    The test split doubles as the early-stopping monitor. A non-finite batch
    loss raises ``DivergenceError`` carrying the metrics of completed epochs.
    """
    check_compatible(model, train_set)
    check_compatible(model, test_set)
    if model.precision is not config.precision:
        model.to_precision(config.precision)
    train_set = train_set.astype(config.precision)
    test_set = test_set.astype(config.precision)

    state, step_fn = make_optimizer(config.optimizer)
    params = model.parameter_dict()
    stopper = EarlyStopping(patience=config.early_stopping_patience) if config.early_stopping_patience else None
    result = TrainResult(metrics=[], model=model, early_stopping=stopper)
    label = label or model.name
    logger.info(
        f"{label}: training {model.parameter_count():,} parameters on {len(train_set)} samples, "
        f"{config.epochs} epochs, batch {config.batch_size}, {config.optimizer.kind.value}, seed {config.seed}"
    )

    for epoch in range(1, config.epochs + 1):
        started = time.perf_counter()
        plan = plan_batches(len(train_set), config.batch_size, derive_seed(config.seed, epoch), config.shuffle)
        batches = tqdm(
            plan,
            total=len(plan),
            desc=f"{label} epoch {epoch}/{config.epochs}",
            leave=False,
            disable=not settings.progress,
        )
        for indices in batches:
            x, y = train_set.take(indices)
            probs = model.forward(x)
            loss = sparse_ce_loss(probs, y)
            if not math.isfinite(loss):
                raise DivergenceError(epoch, loss, result.metrics)
            grads = model.backward(probs, y)
            step_fn(state, params, grads)
            result.steps += 1
            if settings.progress:
                batches.set_postfix(loss=f"{loss:.4f}")

        train_acc, train_loss = evaluate(model, train_set, config.eval_batch_size)
        test_acc, test_loss = evaluate(model, test_set, config.eval_batch_size)
        if not (math.isfinite(train_loss) and math.isfinite(test_loss)):
            raise DivergenceError(epoch, train_loss if not math.isfinite(train_loss) else test_loss, result.metrics)
        metrics = EpochMetrics(
            epoch=epoch,
            train_accuracy=train_acc,
            train_loss=train_loss,
            test_accuracy=test_acc,
            test_loss=test_loss,
            wall_time_seconds=time.perf_counter() - started,
        )
        result.metrics.append(metrics)
        logger.info(
            f"{label} epoch {epoch}: train acc {train_acc:.4f} loss {train_loss:.4f} | "
            f"test acc {test_acc:.4f} loss {test_loss:.4f} | {metrics.wall_time_seconds:.1f}s"
        )
        if on_epoch is not None:
            on_epoch(metrics)

        if stopper is not None and early_stopping_update(stopper, test_loss) is Decision.STOP:
            if stopper.diverged:
                raise DivergenceError(epoch, test_loss, result.metrics)
            result.stopped_early_at = epoch
            result.best_epoch = stopper.best_epoch
            break

    return result


def train_steps(model: Model, x: Tensor, labels: np.ndarray, config: OptimizerConfig, steps: int) -> float:
    """Repeated full-batch updates on one fixed batch; returns the final training accuracy on it."""
    state, step_fn = make_optimizer(config)
    params = model.parameter_dict()
    labels = np.asarray(labels, dtype=np.int64)
    for step in range(1, steps + 1):
        probs = model.forward(x)
        loss = sparse_ce_loss(probs, labels)
        if not math.isfinite(loss):
            raise DivergenceError(step, loss)
        step_fn(state, params, model.backward(probs, labels))
    probs = model.forward(x)
    return float(np.mean(np.asarray(argmax_rows(probs)) == labels))


class DeadUnitReport(BaseModel):
    layer_index: int
    activation: str
    units: int
    dead_units: int
    fraction: float


def dead_unit_fraction(model: Model, dataset: LabeledDataset, batch_size: int = 256) -> list[DeadUnitReport]:
    """Per activation layer, the share of units that output exactly zero on every sample.

    A unit is one column for dense activations and one channel for
    convolutional feature maps.
    """
    check_compatible(model, dataset)
    alive: dict[int, np.ndarray] = {}
    for start in range(0, len(dataset), batch_size):
        out = dataset.images[start : start + batch_size].astype(model.precision.dtype)
        for index, layer in enumerate(model.layers):
            out = layer.forward(out)
            if isinstance(layer, Activation):
                axes = (0,) if out.ndim == 2 else (0, 2, 3)
                fired = np.any(out != 0, axis=axes)
                alive[index] = fired if index not in alive else (alive[index] | fired)
    reports = []
    for index, fired in alive.items():
        dead = int(fired.size - np.count_nonzero(fired))
        reports.append(
            DeadUnitReport(
                layer_index=index,
                activation=model.layers[index].kind.value,
                units=int(fired.size),
                dead_units=dead,
                fraction=dead / fired.size,
            )
        )
    return reports


def extract_feature_maps(model: Model, image: Tensor) -> list[tuple[int, Tensor]]:
    """Post-activation output of every Conv2D -> Activation pair for one image, in layer order."""
    if image.ndim != 4 or image.shape[0] != 1:
        raise dimension_mismatch("extract_feature_maps", image.shape, (1, *model.input_shape))
    if tuple(image.shape[1:]) != model.input_shape:
        raise dimension_mismatch("extract_feature_maps", image.shape, (1, *model.input_shape))
    maps: list[tuple[int, Tensor]] = []
    out = image.astype(model.precision.dtype)
    previous = None
    for index, layer in enumerate(model.layers):
        out = layer.forward(out)
        if isinstance(layer, Activation) and isinstance(previous, Conv2D):
            maps.append((index, out[0].copy()))
        previous = layer
    return maps
