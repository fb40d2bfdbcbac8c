"""Layer types with cached forward state and exact backward passes.

Batch is always the leading axis. Spatial tensors are [batch, channels, h, w].
Each layer's ``backward`` returns the gradient with respect to its input and
leaves parameter gradients in ``layer.grads`` under the same keys as
``layer.params``.
"""
from abc import ABC, abstractmethod
from typing import Any, Dict, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..activations import (
    DEFAULT_PARAMS,
    PIECEWISE_KINDS,
    ActivationKind,
    ActivationParams,
    derivative_array,
    forward_array,
)
from ..core.error_codes import ErrorCode, get_error_message
from ..core.exceptions import (
    ConfigurationError,
    dimension_mismatch,
    invalid_hyperparameter,
    missing_cache,
    rank_mismatch,
    stale_cache,
)
from ..tensor import Tensor, add_bias, matmul, transpose2d

Shape = tuple[int, ...]


class Layer(ABC):
    """Base class; ``params``/``grads`` are empty for parameter-free layers."""

    def __init__(self) -> None:
        self.params: Dict[str, Tensor] = {}
        self.grads: Dict[str, Tensor] = {}
        self._cache: Dict[str, Any] | None = None

    @property
    def name(self) -> str:
        return type(self).__name__

    @abstractmethod
    def output_shape(self, input_shape: Shape) -> Shape:
        """Per-sample output shape for a per-sample input shape (batch axis excluded)."""

    @abstractmethod
    def forward(self, x: Tensor) -> Tensor:
        pass

    @abstractmethod
    def backward(self, grad_out: Tensor) -> Tensor:
        pass

    def describe(self) -> str:
        return self.name

    def clear_cache(self) -> None:
        self._cache = None

    def _require_cache(self, grad_out: Tensor) -> Dict[str, Any]:
        if self._cache is None:
            raise missing_cache(self.describe())
        out_shape = self._cache["out_shape"]
        if grad_out.shape != tuple(out_shape):
            raise stale_cache(self.describe(), f"cached output {tuple(out_shape)}, gradient {grad_out.shape}")
        return self._cache

    def astype(self, dtype: np.dtype) -> None:
        for key, value in self.params.items():
            self.params[key] = value.astype(dtype)
        self.grads = {}
        self._cache = None


class Dense(Layer):
    def __init__(self, in_features: int, out_features: int, dtype: np.dtype = np.dtype(np.float32)):
        super().__init__()
        if in_features < 1 or out_features < 1:
            raise ConfigurationError(f"Dense extents must be positive, got ({in_features}, {out_features})")
        self.in_features = in_features
        self.out_features = out_features
        self.params = {
            "weight": np.zeros((in_features, out_features), dtype=dtype),
            "bias": np.zeros(out_features, dtype=dtype),
        }

    def describe(self) -> str:
        return f"Dense({self.in_features},{self.out_features})"

    def output_shape(self, input_shape: Shape) -> Shape:
        if tuple(input_shape) != (self.in_features,):
            raise dimension_mismatch(self.describe(), input_shape, (self.in_features,))
        return (self.out_features,)

    def forward(self, x: Tensor) -> Tensor:
        z = add_bias(matmul(x, self.params["weight"]), self.params["bias"])
        self._cache = {"a_prev": x, "out_shape": z.shape}
        return z

    def backward(self, grad_out: Tensor) -> Tensor:
        cache = self._require_cache(grad_out)
        a_prev = cache["a_prev"]
        self.grads = {
            "weight": matmul(transpose2d(a_prev), grad_out),
            "bias": grad_out.sum(axis=0),
        }
        return matmul(grad_out, transpose2d(self.params["weight"]))


class Conv2D(Layer):
    """Cross-correlation (no kernel flip) with zero padding and a per-channel bias."""

    def __init__(
        self,
        in_channels: int,
        out_channels: int,
        kernel_h: int,
        kernel_w: int,
        stride: int = 1,
        padding: int = 0,
        dtype: np.dtype = np.dtype(np.float32),
    ):
        super().__init__()
        if min(in_channels, out_channels, kernel_h, kernel_w, stride) < 1 or padding < 0:
            raise ConfigurationError(
                f"Invalid Conv2D configuration: in={in_channels} out={out_channels} "
                f"kernel={kernel_h}x{kernel_w} stride={stride} padding={padding}"
            )
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel_h = kernel_h
        self.kernel_w = kernel_w
        self.stride = stride
        self.padding = padding
        self.params = {
            "weight": np.zeros((out_channels, in_channels, kernel_h, kernel_w), dtype=dtype),
            "bias": np.zeros(out_channels, dtype=dtype),
        }

    def describe(self) -> str:
        return (
            f"Conv2D({self.in_channels}->{self.out_channels},{self.kernel_h}x{self.kernel_w},"
            f"s{self.stride},p{self.padding})"
        )

    def _extent(self, size: int, kernel: int) -> int:
        span = size + 2 * self.padding - kernel
        if span < 0 or span % self.stride != 0:
            raise ConfigurationError(
                get_error_message(
                    ErrorCode.INVALID_LAYER_GEOMETRY, layer=self.describe(), extent=f"{span}/{self.stride}+1"
                )
            )
        return span // self.stride + 1

    def output_shape(self, input_shape: Shape) -> Shape:
        if len(input_shape) != 3:
            raise rank_mismatch(self.describe(), 3, input_shape)
        channels, h, w = input_shape
        if channels != self.in_channels:
            raise dimension_mismatch(self.describe(), input_shape, (self.in_channels, h, w))
        return (self.out_channels, self._extent(h, self.kernel_h), self._extent(w, self.kernel_w))

    def forward(self, x: Tensor) -> Tensor:
        if x.ndim != 4:
            raise rank_mismatch(self.describe(), 4, x.shape)
        _, out_h, out_w = self.output_shape(x.shape[1:])
        p, s = self.padding, self.stride
        x_pad = np.pad(x, ((0, 0), (0, 0), (p, p), (p, p))) if p else x
        # [batch, in_ch, out_h, out_w, kh, kw]
        windows = sliding_window_view(x_pad, (self.kernel_h, self.kernel_w), axis=(2, 3))[:, :, ::s, ::s]
        windows = windows[:, :, :out_h, :out_w]
        out = np.tensordot(windows, self.params["weight"], axes=([1, 4, 5], [1, 2, 3]))
        out = out.transpose(0, 3, 1, 2) + self.params["bias"][None, :, None, None]
        out = np.ascontiguousarray(out)
        self._cache = {"windows": windows, "in_shape": x.shape, "out_shape": out.shape}
        return out

    def backward(self, grad_out: Tensor) -> Tensor:
        cache = self._require_cache(grad_out)
        windows = cache["windows"]
        batch, channels, h, w = cache["in_shape"]
        _, _, out_h, out_w = grad_out.shape
        weight = self.params["weight"]
        p, s = self.padding, self.stride

        self.grads = {
            "weight": np.tensordot(grad_out, windows, axes=([0, 2, 3], [0, 2, 3])),
            "bias": grad_out.sum(axis=(0, 2, 3)),
        }

        grad_pad = np.zeros((batch, channels, h + 2 * p, w + 2 * p), dtype=grad_out.dtype)
        for i in range(self.kernel_h):
            for j in range(self.kernel_w):
                # [batch, out_h, out_w, in_ch] -> [batch, in_ch, out_h, out_w]
                contribution = np.tensordot(grad_out, weight[:, :, i, j], axes=([1], [0])).transpose(0, 3, 1, 2)
                grad_pad[:, :, i : i + s * out_h : s, j : j + s * out_w : s] += contribution
        if p:
            return np.ascontiguousarray(grad_pad[:, :, p:-p, p:-p])
        return grad_pad


class MaxPool2D(Layer):
    """Window maximum with floor semantics: trailing rows/columns that do not fill a window are dropped."""

    def __init__(self, pool_h: int = 2, pool_w: int = 2, stride: int | None = None):
        super().__init__()
        self.pool_h = pool_h
        self.pool_w = pool_w
        self.stride = pool_h if stride is None else stride
        if min(self.pool_h, self.pool_w) < 1:
            raise ConfigurationError(f"Invalid pool window {pool_h}x{pool_w}")
        if self.stride < 1:
            raise invalid_hyperparameter("stride", f"pool stride must be at least 1, got {self.stride}")

    def describe(self) -> str:
        return f"MaxPool2D({self.pool_h}x{self.pool_w},s{self.stride})"

    def output_shape(self, input_shape: Shape) -> Shape:
        if len(input_shape) != 3:
            raise rank_mismatch(self.describe(), 3, input_shape)
        channels, h, w = input_shape
        if self.pool_h > h or self.pool_w > w:
            raise ConfigurationError(
                get_error_message(
                    ErrorCode.POOL_WINDOW_TOO_LARGE,
                    layer=self.describe(),
                    window=(self.pool_h, self.pool_w),
                    spatial=(h, w),
                ),
                error_code=ErrorCode.POOL_WINDOW_TOO_LARGE,
            )
        return (channels, (h - self.pool_h) // self.stride + 1, (w - self.pool_w) // self.stride + 1)

    def forward(self, x: Tensor) -> Tensor:
        if x.ndim != 4:
            raise rank_mismatch(self.describe(), 4, x.shape)
        _, out_h, out_w = self.output_shape(x.shape[1:])
        s = self.stride
        windows = sliding_window_view(x, (self.pool_h, self.pool_w), axis=(2, 3))[:, :, ::s, ::s]
        windows = windows[:, :, :out_h, :out_w]
        flat = windows.reshape(*windows.shape[:4], self.pool_h * self.pool_w)
        # argmax keeps the first maximum of the row-major window scan
        arg = flat.argmax(axis=-1)
        out = np.take_along_axis(flat, arg[..., None], axis=-1)[..., 0]
        self._cache = {"arg": arg, "in_shape": x.shape, "out_shape": out.shape}
        return np.ascontiguousarray(out)

    def argmax_positions(self) -> tuple[np.ndarray, np.ndarray]:
        """Input (row, col) of each cached window maximum."""
        if self._cache is None:
            raise missing_cache(self.describe())
        arg = self._cache["arg"]
        out_h, out_w = arg.shape[2], arg.shape[3]
        rows = np.arange(out_h)[:, None] * self.stride + arg // self.pool_w
        cols = np.arange(out_w)[None, :] * self.stride + arg % self.pool_w
        return rows, cols

    def branch_mask(self) -> np.ndarray:
        """Winning offset inside every window of the last forward."""
        if self._cache is None:
            raise missing_cache(self.describe())
        return self._cache["arg"].copy()

    def backward(self, grad_out: Tensor) -> Tensor:
        cache = self._require_cache(grad_out)
        batch, channels, h, w = cache["in_shape"]
        rows, cols = self.argmax_positions()
        b_idx = np.arange(batch)[:, None, None, None]
        c_idx = np.arange(channels)[None, :, None, None]
        grad_in = np.zeros((batch, channels, h, w), dtype=grad_out.dtype)
        # Overlapping windows (stride < pool) can route to the same position
        np.add.at(grad_in, (b_idx, c_idx, rows, cols), grad_out)
        return grad_in


class Flatten(Layer):
    def output_shape(self, input_shape: Shape) -> Shape:
        return (int(np.prod(input_shape)),)

    def forward(self, x: Tensor) -> Tensor:
        self._cache = {"in_shape": x.shape, "out_shape": (x.shape[0], int(np.prod(x.shape[1:])))}
        return x.reshape(x.shape[0], -1)

    def backward(self, grad_out: Tensor) -> Tensor:
        cache = self._require_cache(grad_out)
        return grad_out.reshape(cache["in_shape"])


class Activation(Layer):
    def __init__(self, kind: ActivationKind, params: ActivationParams = DEFAULT_PARAMS):
        super().__init__()
        self.kind = ActivationKind.parse(kind)
        self.act_params = params

    def describe(self) -> str:
        return f"Activation({self.kind.value})"

    def output_shape(self, input_shape: Shape) -> Shape:
        return tuple(input_shape)

    def forward(self, x: Tensor) -> Tensor:
        self._cache = {"z": x, "out_shape": x.shape}
        return forward_array(self.kind, x, self.act_params)

    def backward(self, grad_out: Tensor) -> Tensor:
        cache = self._require_cache(grad_out)
        return grad_out * derivative_array(self.kind, cache["z"], self.act_params)

    @property
    def piecewise(self) -> bool:
        return self.kind in PIECEWISE_KINDS

    def branch_mask(self) -> np.ndarray:
        """Which inputs of the last forward sat above 0; a change between two passes means a kink was crossed."""
        if self._cache is None:
            raise missing_cache(self.describe())
        return self._cache["z"] > 0


def softmax_forward(z: Tensor) -> Tensor:
    """Row-wise softmax with max subtraction."""
    if z.ndim != 2:
        raise rank_mismatch("softmax_forward", 2, z.shape)
    shifted = z - z.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


class Softmax(Layer):
    def output_shape(self, input_shape: Shape) -> Shape:
        if len(input_shape) != 1:
            raise rank_mismatch("Softmax", 1, input_shape)
        return tuple(input_shape)

    def forward(self, x: Tensor) -> Tensor:
        probs = softmax_forward(x)
        self._cache = {"probs": probs, "out_shape": probs.shape}
        return probs

    def backward(self, grad_out: Tensor) -> Tensor:
        """Vector-Jacobian product of the softmax alone (training uses the fused CE path)."""
        cache = self._require_cache(grad_out)
        p = cache["probs"]
        return p * (grad_out - (grad_out * p).sum(axis=1, keepdims=True))


def dense_forward(layer: Dense, a_prev: Tensor) -> Tensor:
    return layer.forward(a_prev)


def dense_backward(layer: Dense, grad_z: Tensor) -> tuple[Tensor, Tensor, Tensor]:
    grad_a_prev = layer.backward(grad_z)
    return grad_a_prev, layer.grads["weight"], layer.grads["bias"]


def conv2d_forward(layer: Conv2D, a_prev: Tensor) -> Tensor:
    return layer.forward(a_prev)


def conv2d_backward(layer: Conv2D, grad_out: Tensor) -> tuple[Tensor, Tensor, Tensor]:
    grad_in = layer.backward(grad_out)
    return grad_in, layer.grads["weight"], layer.grads["bias"]


def maxpool_forward(layer: MaxPool2D, a_prev: Tensor) -> Tensor:
    return layer.forward(a_prev)


def maxpool_backward(layer: MaxPool2D, grad_out: Tensor) -> Tensor:
    return layer.backward(grad_out)


def parameter_count(layers: Sequence[Layer]) -> int:
    return int(sum(p.size for layer in layers for p in layer.params.values()))
