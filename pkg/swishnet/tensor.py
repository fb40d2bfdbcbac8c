"""Dense row-major tensors and the arithmetic primitives the layers build on.

Tensors are plain ``numpy.ndarray`` values in C (row-major) order. The helpers
here only add the shape validation the rest of the framework relies on; there
is deliberately no broadcasting beyond the bias add.
"""
from enum import Enum
from typing import Any, Sequence

import numpy as np
from numpy.typing import NDArray

from .core.exceptions import dimension_mismatch, rank_mismatch

Tensor = NDArray[np.floating]


class Precision(str, Enum):
    SINGLE = "single"
    DOUBLE = "double"

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(np.float32) if self is Precision.SINGLE else np.dtype(np.float64)

    @classmethod
    def of(cls, t: np.ndarray) -> "Precision":
        return cls.DOUBLE if t.dtype == np.float64 else cls.SINGLE


def as_tensor(data: Any, precision: Precision = Precision.SINGLE, *, shape: Sequence[int] | None = None) -> Tensor:
    """Build a contiguous tensor in the requested precision, optionally reshaping flat data."""
    t = np.ascontiguousarray(np.asarray(data, dtype=precision.dtype))
    if shape is not None:
        expected = int(np.prod(shape))
        if t.size != expected:
            raise dimension_mismatch("as_tensor", [t.size], list(shape))
        t = t.reshape(tuple(shape))
    if t.ndim < 1:
        t = t.reshape(1)
    return t


def _require_rank(operation: str, t: np.ndarray, rank: int) -> None:
    if t.ndim != rank:
        raise rank_mismatch(operation, rank, t.shape)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """c[i, j] = sum_p a[i, p] * b[p, j] for rank-2 operands."""
    _require_rank("matmul", a, 2)
    _require_rank("matmul", b, 2)
    if a.shape[1] != b.shape[0]:
        raise dimension_mismatch("matmul", a.shape, b.shape)
    return a @ b


def add_bias(z: Tensor, bias: Tensor) -> Tensor:
    """Add a per-column bias to every row of a [batch, n] tensor."""
    _require_rank("add_bias", z, 2)
    _require_rank("add_bias", bias, 1)
    if z.shape[1] != bias.shape[0]:
        raise dimension_mismatch("add_bias", z.shape, bias.shape)
    return z + bias


def argmax_rows(t: Tensor) -> list[int]:
    """Index of each row's maximum; ties resolve to the lowest index."""
    _require_rank("argmax_rows", t, 2)
    if t.shape[1] < 1:
        raise rank_mismatch("argmax_rows", 2, t.shape)
    # np.argmax returns the first occurrence
    return [int(i) for i in np.argmax(t, axis=1)]


def transpose2d(t: Tensor) -> Tensor:
    _require_rank("transpose2d", t, 2)
    return np.ascontiguousarray(t.T)
