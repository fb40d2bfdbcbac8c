"""Sequential models and their whole-network forward/backward passes."""
from typing import Iterator, Sequence

import numpy as np

from ..core.exceptions import ConfigurationError, DimensionError, SwishNetError, dimension_mismatch, stale_cache
from ..logger import logger
from ..tensor import Precision, Tensor
from .layers import Layer, Shape, Softmax, parameter_count
from .losses import softmax_ce_backward


class GradientSet(dict[tuple[int, str], np.ndarray]):
    """Parameter gradients keyed by (layer index, parameter name)."""

    def all_finite(self) -> bool:
        return all(bool(np.isfinite(g).all()) for g in self.values())

    def global_norm(self) -> float:
        return float(np.sqrt(sum(float(np.sum(np.square(g, dtype=np.float64))) for g in self.values())))


class Model:
    """Ordered layers validated against a declared per-sample input shape.

    Construction walks the layers once to check that adjacent shapes conform,
    so a mis-assembled architecture fails before any data is touched.
    """

    def __init__(
        self,
        layers: Sequence[Layer],
        input_shape: Shape,
        *,
        precision: Precision = Precision.SINGLE,
        name: str = "model",
    ):
        self.layers: list[Layer] = list(layers)
        self.input_shape: Shape = tuple(int(v) for v in input_shape)
        self.name = name
        self.precision = precision
        self._last_output: Tensor | None = None
        self.output_shape = self._validate_shapes()
        self.to_precision(precision)

    def _validate_shapes(self) -> Shape:
        shape = self.input_shape
        for index, layer in enumerate(self.layers):
            try:
                shape = layer.output_shape(shape)
            except SwishNetError as e:
                e.message = f"layer {index} ({layer.describe()}): {e.message}"
                e.metadata["layer_index"] = index
                e.args = (e.message,)
                raise
        return shape

    @property
    def class_count(self) -> int:
        return int(self.output_shape[-1]) if self.output_shape else 0

    @property
    def is_classifier(self) -> bool:
        return bool(self.layers) and isinstance(self.layers[-1], Softmax)

    def to_precision(self, precision: Precision) -> "Model":
        self.precision = precision
        for layer in self.layers:
            layer.astype(precision.dtype)
        self._last_output = None
        return self

    def parameters(self) -> Iterator[tuple[int, str, np.ndarray]]:
        for index, layer in enumerate(self.layers):
            for name, value in layer.params.items():
                yield index, name, value

    def parameter_dict(self) -> dict[tuple[int, str], np.ndarray]:
        return {(index, name): value for index, name, value in self.parameters()}

    def parameter_count(self) -> int:
        return parameter_count(self.layers)

    def summary(self) -> str:
        lines = [f"{self.name}: input {self.input_shape} -> output {self.output_shape}"]
        shape = self.input_shape
        for index, layer in enumerate(self.layers):
            shape = layer.output_shape(shape)
            count = sum(p.size for p in layer.params.values())
            lines.append(f"  [{index:2d}] {layer.describe():<36} {str(shape):<18} {count:>10,}")
        lines.append(f"  total parameters: {self.parameter_count():,}")
        return "\n".join(lines)

    def forward(self, x: Tensor, *, upto: int | None = None) -> Tensor:
        """Apply layers in order; ``upto`` stops after that layer index (feature extraction)."""
        if tuple(x.shape[1:]) != self.input_shape:
            raise DimensionError(
                f"layer 0 ({self.layers[0].describe() if self.layers else 'input'}): "
                f"expected per-sample input {self.input_shape}, got {tuple(x.shape[1:])}",
                metadata={"layer_index": 0},
            )
        if x.dtype != self.precision.dtype:
            x = x.astype(self.precision.dtype)
        stop = len(self.layers) if upto is None else upto + 1
        out = x
        for layer in self.layers[:stop]:
            out = layer.forward(out)
        self._last_output = out if upto is None else None
        return out

    def backward(self, probs: Tensor, labels: np.ndarray) -> GradientSet:
        if not self.is_classifier:
            raise ConfigurationError(f"{self.name}: backward requires a final Softmax layer")
        if self._last_output is None or probs is not self._last_output:
            raise stale_cache(self.name, "probabilities do not come from the latest full forward pass")
        grad = softmax_ce_backward(probs, labels)
        grads = GradientSet()
        # The fused softmax/CE gradient already covers the final layer
        for index in range(len(self.layers) - 2, -1, -1):
            layer = self.layers[index]
            grad = layer.backward(grad)
            for name, g in layer.grads.items():
                if g.shape != layer.params[name].shape:
                    raise dimension_mismatch(f"{layer.describe()}.{name} gradient", g.shape, layer.params[name].shape)
                grads[(index, name)] = g
        logger.trace(f"{self.name}: backward produced {len(grads)} gradient tensors")
        return grads


def model_forward(model: Model, x: Tensor) -> Tensor:
    return model.forward(x)


def model_backward(model: Model, probs: Tensor, labels: np.ndarray) -> GradientSet:
    return model.backward(probs, labels)
