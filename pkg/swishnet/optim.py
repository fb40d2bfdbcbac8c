"""Parameter update rules and the early-stopping controller.

Parameters and gradients are dictionaries keyed by (layer index, parameter
name), the same keys a ``GradientSet`` uses. Updates are applied in place so
the layers keep owning their arrays.
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Hashable, Mapping

import numpy as np

from .core.exceptions import dimension_mismatch, invalid_hyperparameter
from .logger import logger

ParamDict = Mapping[Hashable, np.ndarray]


def _zeros_like(params: ParamDict) -> Dict[Hashable, np.ndarray]:
    return {key: np.zeros_like(value) for key, value in params.items()}


def _check_shapes(params: ParamDict, grads: ParamDict, slots: Mapping[Hashable, np.ndarray]) -> None:
    for key, value in params.items():
        if key not in grads:
            raise dimension_mismatch(f"optimizer gradient {key}", value.shape, ())
        if grads[key].shape != value.shape:
            raise dimension_mismatch(f"optimizer gradient {key}", value.shape, grads[key].shape)
        if key in slots and slots[key].shape != value.shape:
            raise dimension_mismatch(f"optimizer state {key}", value.shape, slots[key].shape)


@dataclass
class SgdMomentumState:
    learning_rate: float = 0.01
    momentum: float = 0.9
    velocity: Dict[Hashable, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise invalid_hyperparameter("learning_rate", "must be positive")
        if not 0.0 <= self.momentum < 1.0:
            raise invalid_hyperparameter("momentum", "must lie in [0, 1)")


@dataclass
class AdamState:
    learning_rate: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step: int = 0
    m: Dict[Hashable, np.ndarray] = field(default_factory=dict)
    v: Dict[Hashable, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise invalid_hyperparameter("learning_rate", "must be positive")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise invalid_hyperparameter("beta1, beta2", "must lie in [0, 1)")
        if self.epsilon <= 0:
            raise invalid_hyperparameter("epsilon", "must be positive")


def sgd_momentum_step(
    state: SgdMomentumState, params: ParamDict, grads: ParamDict
) -> tuple[ParamDict, SgdMomentumState]:
    """v <- momentum*v + g, then theta <- theta - lr*v."""
    if not state.velocity:
        state.velocity = _zeros_like(params)
    _check_shapes(params, grads, state.velocity)
    for key, theta in params.items():
        v = state.velocity[key]
        v *= state.momentum
        v += grads[key]
        theta -= state.learning_rate * v
    return params, state


def adam_step(state: AdamState, params: ParamDict, grads: ParamDict) -> tuple[ParamDict, AdamState]:
    """Bias-corrected Adam; the step counter advances before the correction terms are formed."""
    if not state.m:
        state.m = _zeros_like(params)
        state.v = _zeros_like(params)
    _check_shapes(params, grads, state.m)
    state.step += 1
    correction1 = 1.0 - state.beta1**state.step
    correction2 = 1.0 - state.beta2**state.step
    for key, theta in params.items():
        g = grads[key]
        m, v = state.m[key], state.v[key]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * np.square(g)
        m_hat = m / correction1
        v_hat = v / correction2
        theta -= state.learning_rate * m_hat / (np.sqrt(v_hat) + state.epsilon)
    return params, state


class Decision(str, Enum):
    CONTINUE = "continue"
    STOP = "stop"


@dataclass
class EarlyStopping:
    """Patience counter on validation loss; improvement means strictly lower."""

    patience: int = 5
    monitor: str = "val_loss"
    best: float = math.inf
    best_epoch: int = 0
    epochs_since_best: int = 0
    epochs_seen: int = 0
    diverged: bool = False

    def __post_init__(self) -> None:
        if self.patience < 1:
            raise invalid_hyperparameter("patience", "must be at least 1")


def early_stopping_update(es: EarlyStopping, val_loss: float) -> Decision:
    es.epochs_seen += 1
    if not math.isfinite(val_loss):
        es.diverged = True
        logger.warning(f"{es.monitor} became {val_loss} at epoch {es.epochs_seen}; stopping")
        return Decision.STOP
    if val_loss < es.best:
        es.best = val_loss
        es.best_epoch = es.epochs_seen
        es.epochs_since_best = 0
        return Decision.CONTINUE
    es.epochs_since_best += 1
    if es.epochs_since_best >= es.patience:
        logger.info(
            f"early stop after epoch {es.epochs_seen}: best {es.monitor} {es.best:.6f} at epoch {es.best_epoch}"
        )
        return Decision.STOP
    return Decision.CONTINUE
