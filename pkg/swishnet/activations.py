"""Forward and derivative kernels for the compared activation functions.

All kernels are elementwise numpy expressions that keep the input dtype, so
the same code serves scalars (0-d arrays), single precision training tensors
and double precision gradient checks.
"""
import math
from enum import Enum
from typing import Dict

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, PositiveFloat

from .core.exceptions import unknown_activation
from .tensor import Tensor


class ActivationKind(str, Enum):
    RELU = "relu"
    ELU = "elu"
    SELU = "selu"
    TANH = "tanh"
    SWISH = "swish"
    SWISHRELU = "swishrelu"

    @classmethod
    def parse(cls, name: "str | ActivationKind") -> "ActivationKind":
        """Resolve a lowercase CLI/config name, rejecting anything outside the six kinds."""
        if isinstance(name, ActivationKind):
            return name
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise unknown_activation(name, [k.value for k in cls]) from None

    @property
    def display_name(self) -> str:
        return DISPLAY_NAMES[self]


DISPLAY_NAMES: Dict[ActivationKind, str] = {
    ActivationKind.RELU: "ReLU",
    ActivationKind.ELU: "ELU",
    ActivationKind.SELU: "SeLU",
    ActivationKind.TANH: "Tanh",
    ActivationKind.SWISH: "Swish",
    ActivationKind.SWISHRELU: "SwishReLU",
}


class ActivationParams(BaseModel):
    """Constants for the exponential-family kinds. SeLU values follow its original definition."""

    model_config = ConfigDict(frozen=True)

    elu_alpha: PositiveFloat = 1.0
    selu_alpha: PositiveFloat = 1.67326324
    selu_lambda: PositiveFloat = 1.05070098


DEFAULT_PARAMS = ActivationParams()

# Kinds whose derivative is piecewise with a break at 0
PIECEWISE_KINDS = frozenset({ActivationKind.RELU, ActivationKind.ELU, ActivationKind.SELU, ActivationKind.SWISHRELU})


def sigmoid_array(x: np.ndarray) -> np.ndarray:
    """Overflow-free logistic: 1/(1+e^-x) for x >= 0, e^x/(1+e^x) for x < 0."""
    x = np.asarray(x)
    e = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + e), e / (1.0 + e)).astype(x.dtype, copy=False)


def sigmoid(x: float) -> float:
    return float(sigmoid_array(np.float64(x)))


def _exp_branch(x: np.ndarray) -> np.ndarray:
    # Negative half only, so large positive inputs never reach exp
    return np.minimum(x, 0)


def forward_array(kind: ActivationKind, x: np.ndarray, params: ActivationParams = DEFAULT_PARAMS) -> np.ndarray:
    x = np.asarray(x)
    match kind:
        case ActivationKind.RELU:
            out = np.where(x > 0, x, 0)
        case ActivationKind.ELU:
            out = np.where(x > 0, x, params.elu_alpha * np.expm1(_exp_branch(x)))
        case ActivationKind.SELU:
            out = params.selu_lambda * np.where(x > 0, x, params.selu_alpha * np.expm1(_exp_branch(x)))
        case ActivationKind.TANH:
            out = np.tanh(x)
        case ActivationKind.SWISH:
            out = x * sigmoid_array(x)
        case ActivationKind.SWISHRELU:
            # x = 0 takes the identity branch
            out = np.where(x < 0, x * sigmoid_array(x), x)
        case _:
            raise unknown_activation(str(kind), [k.value for k in ActivationKind])
    return np.asarray(out, dtype=x.dtype)


def derivative_array(kind: ActivationKind, x: np.ndarray, params: ActivationParams = DEFAULT_PARAMS) -> np.ndarray:
    x = np.asarray(x)
    match kind:
        case ActivationKind.RELU:
            # Subgradient 0 at the kink
            out = np.where(x > 0, 1.0, 0.0)
        case ActivationKind.ELU:
            out = np.where(x > 0, 1.0, params.elu_alpha * np.exp(_exp_branch(x)))
        case ActivationKind.SELU:
            out = params.selu_lambda * np.where(x > 0, 1.0, params.selu_alpha * np.exp(_exp_branch(x)))
        case ActivationKind.TANH:
            t = np.tanh(x)
            out = 1.0 - t * t
        case ActivationKind.SWISH:
            out = _swish_derivative(x)
        case ActivationKind.SWISHRELU:
            out = np.where(x < 0, _swish_derivative(x), 1.0)
        case _:
            raise unknown_activation(str(kind), [k.value for k in ActivationKind])
    return np.asarray(out, dtype=x.dtype)


def _swish_derivative(x: np.ndarray) -> np.ndarray:
    s = sigmoid_array(x)
    return s * (1.0 + x * (1.0 - s))


def act_forward(kind: ActivationKind, x: float, params: ActivationParams = DEFAULT_PARAMS) -> float:
    return float(forward_array(kind, np.float64(x), params))


def act_derivative(kind: ActivationKind, x: float, params: ActivationParams = DEFAULT_PARAMS) -> float:
    return float(derivative_array(kind, np.float64(x), params))


def act_forward_tensor(kind: ActivationKind, t: Tensor, params: ActivationParams = DEFAULT_PARAMS) -> Tensor:
    return forward_array(kind, t, params)


def act_derivative_tensor(kind: ActivationKind, t: Tensor, params: ActivationParams = DEFAULT_PARAMS) -> Tensor:
    return derivative_array(kind, t, params)


def swish_global_min(tol: float = 1e-12, max_iter: int = 200) -> tuple[float, float]:
    """Minimiser of x*sigmoid(x) and its value, by safeguarded Newton on the derivative over [-5, 0].

    SwishReLU shares this lower bound because its negative branch is Swish.
    """
    lo, hi = -5.0, 0.0
    x = -1.25
    for _ in range(max_iter):
        s = sigmoid(x)
        grad = s * (1.0 + x * (1.0 - s))
        if abs(grad) < tol:
            break
        # Keep the bracket: grad < 0 left of the minimiser, > 0 right of it
        if grad < 0:
            lo = x
        else:
            hi = x
        curvature = s * (1.0 - s) * (2.0 + x * (1.0 - 2.0 * s))
        step = x - grad / curvature if curvature > 0 else math.nan
        x = step if lo < step < hi else 0.5 * (lo + hi)
    return x, x * sigmoid(x)


def activation_curves(
    kinds: list[ActivationKind] | None = None,
    *,
    x_min: float = -6.0,
    x_max: float = 6.0,
    points: int = 1201,
    params: ActivationParams = DEFAULT_PARAMS,
) -> pd.DataFrame:
    """Tabulate f(x) and f'(x) of each kind on a uniform grid (one column pair per kind)."""
    if kinds is None:
        kinds = list(ActivationKind)
    x = np.linspace(x_min, x_max, points, dtype=np.float64)
    columns: Dict[str, np.ndarray] = {"x": x}
    for kind in kinds:
        columns[kind.value] = forward_array(kind, x, params)
        columns[f"d_{kind.value}"] = derivative_array(kind, x, params)
    return pd.DataFrame(columns)

