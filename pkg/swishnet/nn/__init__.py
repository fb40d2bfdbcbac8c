from .layers import (
    Activation,
    Conv2D,
    Dense,
    Flatten,
    Layer,
    MaxPool2D,
    Softmax,
    conv2d_backward,
    conv2d_forward,
    dense_backward,
    dense_forward,
    maxpool_backward,
    maxpool_forward,
    softmax_forward,
)
from .losses import softmax_ce_backward, sparse_ce_loss
from .model import GradientSet, Model, model_backward, model_forward
from .gradcheck import GradCheckReport, grad_check

__all__ = [
    "Activation",
    "Conv2D",
    "Dense",
    "Flatten",
    "Layer",
    "MaxPool2D",
    "Softmax",
    "conv2d_backward",
    "conv2d_forward",
    "dense_backward",
    "dense_forward",
    "maxpool_backward",
    "maxpool_forward",
    "softmax_forward",
    "softmax_ce_backward",
    "sparse_ce_loss",
    "GradientSet",
    "Model",
    "model_backward",
    "model_forward",
    "GradCheckReport",
    "grad_check",
]
