"""Builders for the fully connected, five-conv and VGG16 classifiers, plus weight init."""
import math
from typing import Sequence

import numpy as np

from ..activations import ActivationKind
from ..core.error_codes import ErrorCode, get_error_message
from ..core.exceptions import ConfigurationError
from ..nn import Activation, Conv2D, Dense, Flatten, Layer, MaxPool2D, Model, Softmax
from ..rng import numpy_generator
from ..tensor import Precision
from .config import ArchName, ArchSpec

POOL = "P"

CNN5_FILTERS = (32, 32, 64, 64, 128)
CNN5_DENSE = 256
CNN5_SMALL_FILTERS = (4, 4, 8, 8, 8)
CNN5_SMALL_DENSE = 16
# Pools follow the 2nd, 4th and 5th conv
CNN5_POOL_AFTER = (1, 3, 4)

VGG16_CONFIG: tuple[int | str, ...] = (
    64, 64, POOL,
    128, 128, POOL,
    256, 256, 256, POOL,
    512, 512, 512, POOL,
    512, 512, 512, POOL,
)  # fmt: skip


def _conv_stack(
    config: Sequence[int | str], in_channels: int, activation: ActivationKind, dtype: np.dtype
) -> tuple[list[Layer], int]:
    layers: list[Layer] = []
    channels = in_channels
    for item in config:
        if item == POOL:
            layers.append(MaxPool2D(2, 2, 2))
        else:
            layers += [Conv2D(channels, int(item), 3, 3, stride=1, padding=1, dtype=dtype), Activation(activation)]
            channels = int(item)
    return layers, channels


def _dense_head(
    in_features: int, hidden: Sequence[int], class_count: int, activation: ActivationKind, dtype: np.dtype
) -> list[Layer]:
    layers: list[Layer] = [Flatten()]
    width = in_features
    for units in hidden:
        layers += [Dense(width, units, dtype=dtype), Activation(activation)]
        width = units
    layers += [Dense(width, class_count, dtype=dtype), Softmax()]
    return layers


def build_fcnn(
    dense_activation: ActivationKind,
    class_count: int = 10,
    *,
    input_shape: tuple[int, int, int] = (1, 28, 28),
    hidden: Sequence[int] = (300, 100),
    precision: Precision = Precision.SINGLE,
) -> Model:
    """Flatten -> Dense(784, 300) -> act -> Dense(300, 100) -> act -> Dense(100, K) -> Softmax."""
    features = int(np.prod(input_shape))
    layers = _dense_head(features, hidden, class_count, ActivationKind.parse(dense_activation), precision.dtype)
    return Model(layers, input_shape, precision=precision, name="fcnn")


def build_cnn5(
    conv_activation: ActivationKind,
    dense_activation: ActivationKind,
    class_count: int = 10,
    *,
    input_shape: tuple[int, int, int] = (3, 32, 32),
    filters: Sequence[int] = CNN5_FILTERS,
    dense_units: int = CNN5_DENSE,
    precision: Precision = Precision.SINGLE,
) -> Model:
    if len(filters) != 5:
        raise ConfigurationError(f"cnn5 needs five filter widths, got {list(filters)}")
    config: list[int | str] = []
    for index, width in enumerate(filters):
        config.append(width)
        if index in CNN5_POOL_AFTER:
            config.append(POOL)
    channels, h, w = input_shape
    conv_layers, out_channels = _conv_stack(config, channels, ActivationKind.parse(conv_activation), precision.dtype)
    pools = len(CNN5_POOL_AFTER)
    flat = out_channels * (h >> pools) * (w >> pools)
    head = _dense_head(flat, (dense_units,), class_count, ActivationKind.parse(dense_activation), precision.dtype)
    name = "cnn5" if tuple(filters) == CNN5_FILTERS else "cnn5-small"
    return Model(conv_layers + head, input_shape, precision=precision, name=name)


def build_vgg16(
    activation: ActivationKind,
    class_count: int = 10,
    *,
    input_shape: tuple[int, int, int] = (3, 32, 32),
    width_divisor: int = 1,
    precision: Precision = Precision.SINGLE,
) -> Model:
    """Thirteen 3x3 convs in five pooled blocks, then a 512-512-K head.

    ``width_divisor`` scales every channel count down (tests use it to keep the
    layer structure at a fraction of the cost).
    """
    if width_divisor < 1:
        raise ConfigurationError(f"width_divisor must be at least 1, got {width_divisor}")
    kind = ActivationKind.parse(activation)
    config = [item if item == POOL else max(1, int(item) // width_divisor) for item in VGG16_CONFIG]
    conv_layers, out_channels = _conv_stack(config, input_shape[0], kind, precision.dtype)
    pools = config.count(POOL)
    flat = out_channels * (input_shape[1] >> pools) * (input_shape[2] >> pools)
    hidden = max(1, 512 // width_divisor)
    head = _dense_head(flat, (hidden, hidden), class_count, kind, precision.dtype)
    return Model(conv_layers + head, input_shape, precision=precision, name="vgg16")


def build_model(spec: ArchSpec, precision: Precision = Precision.SINGLE) -> Model:
    match spec.name:
        case ArchName.FCNN:
            return build_fcnn(
                spec.dense_activation, spec.class_count, input_shape=spec.input_shape, precision=precision
            )
        case ArchName.CNN5:
            return build_cnn5(
                spec.conv_activation,
                spec.dense_activation,
                spec.class_count,
                input_shape=spec.input_shape,
                precision=precision,
            )
        case ArchName.CNN5_SMALL:
            return build_cnn5(
                spec.conv_activation,
                spec.dense_activation,
                spec.class_count,
                input_shape=spec.input_shape,
                filters=CNN5_SMALL_FILTERS,
                dense_units=CNN5_SMALL_DENSE,
                precision=precision,
            )
        case ArchName.VGG16:
            return build_vgg16(
                spec.conv_activation, spec.class_count, input_shape=spec.input_shape, precision=precision
            )
    raise ConfigurationError(get_error_message(ErrorCode.INVALID_ARCHITECTURE, arch=spec.name))


def _following_activation(layers: Sequence[Layer], index: int) -> ActivationKind | None:
    for layer in layers[index + 1 :]:
        if isinstance(layer, Activation):
            return layer.kind
        if isinstance(layer, (Dense, Conv2D, Softmax)):
            return None
    return None


def init_bound(layer: Dense | Conv2D, following: ActivationKind | None) -> float:
    """He-uniform sqrt(6/fan_in), or Glorot-uniform sqrt(6/(fan_in+fan_out)) ahead of tanh."""
    if isinstance(layer, Dense):
        fan_in, fan_out = layer.in_features, layer.out_features
    else:
        receptive = layer.kernel_h * layer.kernel_w
        fan_in, fan_out = layer.in_channels * receptive, layer.out_channels * receptive
    if following is ActivationKind.TANH:
        return math.sqrt(6.0 / (fan_in + fan_out))
    return math.sqrt(6.0 / fan_in)


def init_parameters(model: Model, seed: int) -> Model:
    """Seeded uniform weights, zero biases; each layer draws from its own stream."""
    for index, layer in enumerate(model.layers):
        if not isinstance(layer, (Dense, Conv2D)):
            continue
        bound = init_bound(layer, _following_activation(model.layers, index))
        rng = numpy_generator(seed, stream=0x1000 + index)
        weight = layer.params["weight"]
        layer.params["weight"] = rng.uniform(-bound, bound, size=weight.shape).astype(weight.dtype)
        layer.params["bias"] = np.zeros_like(layer.params["bias"])
    return model
