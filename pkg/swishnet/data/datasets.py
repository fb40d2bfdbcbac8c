"""In-memory labelled datasets, batch plans and synthetic fixtures."""
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from ..core.exceptions import ConsistencyError, invalid_hyperparameter, invalid_parameter, label_out_of_range
from ..core.error_codes import ErrorCode, get_error_message
from ..rng import Xoshiro256StarStar, numpy_generator
from ..tensor import Precision, Tensor

SEPARABLE_SHIFT = 0.3
SEPARABLE_NOISE = 0.2


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    images: Tensor
    labels: np.ndarray
    class_count: int
    name: str = "dataset"

    def __post_init__(self) -> None:
        if self.images.ndim != 4:
            raise invalid_parameter("images", f"expected [n, channels, height, width], got {self.images.shape}")
        if self.labels.shape != (self.images.shape[0],):
            raise ConsistencyError(
                get_error_message(ErrorCode.COUNT_MISMATCH, images=self.images.shape[0], labels=self.labels.shape[0])
            )
        bad = (self.labels < 0) | (self.labels >= self.class_count)
        if bad.any():
            raise label_out_of_range(int(self.labels[bad][0]), self.class_count)

    def __len__(self) -> int:
        return int(self.images.shape[0])

    @property
    def sample_shape(self) -> tuple[int, int, int]:
        return tuple(int(v) for v in self.images.shape[1:])  # type: ignore[return-value]

    @property
    def precision(self) -> Precision:
        return Precision.of(self.images)

    def take(self, indices: np.ndarray | Sequence[int]) -> tuple[Tensor, np.ndarray]:
        idx = np.asarray(indices, dtype=np.int64)
        return self.images[idx], self.labels[idx]

    def head(self, n: int | None) -> "LabeledDataset":
        """First ``n`` samples (all of them when ``n`` is None or too large)."""
        if n is None or n >= len(self):
            return self
        if n < 1:
            raise invalid_parameter("subset", f"must be at least 1, got {n}")
        return LabeledDataset(self.images[:n], self.labels[:n], self.class_count, f"{self.name}[:{n}]")

    def astype(self, precision: Precision) -> "LabeledDataset":
        if self.precision is precision:
            return self
        return LabeledDataset(self.images.astype(precision.dtype), self.labels, self.class_count, self.name)


@dataclass
class BatchPlan:
    batch_size: int
    order: np.ndarray
    seed: int
    shuffled: bool = False
    _count: int = field(init=False, default=0)

    def __post_init__(self) -> None:
        self._count = math.ceil(len(self.order) / self.batch_size) if len(self.order) else 0

    def __len__(self) -> int:
        return self._count

    def __iter__(self) -> Iterator[np.ndarray]:
        for start in range(0, len(self.order), self.batch_size):
            yield self.order[start : start + self.batch_size]


def plan_batches(n: int, batch_size: int, seed: int, shuffle: bool = True) -> BatchPlan:
    """Batch order for one epoch; the final short batch is kept."""
    if batch_size < 1:
        raise invalid_hyperparameter("batch_size", "must be at least 1")
    if shuffle:
        order = Xoshiro256StarStar(seed).permutation(n)
    else:
        order = np.arange(n, dtype=np.int64)
    return BatchPlan(batch_size=batch_size, order=order, seed=seed, shuffled=shuffle)


def make_synthetic(
    n: int,
    shape: Sequence[int],
    class_count: int,
    seed: int,
    *,
    separable: bool = False,
    precision: Precision = Precision.SINGLE,
) -> LabeledDataset:
    """Seeded images in [0, 1] with balanced labels.

    With ``separable`` and two classes, class 0 is centred at 0.5 - 0.3 and
    class 1 at 0.5 + 0.3 with uniform noise of half-width 0.2, so the pixel
    mean alone separates them.
    """
    if n < 1:
        raise invalid_parameter("n", "synthetic datasets need at least one sample")
    if class_count < 1:
        raise invalid_parameter("class_count", "must be at least 1")
    shape = tuple(int(v) for v in shape)
    if len(shape) != 3:
        raise invalid_parameter("shape", f"expected (channels, height, width), got {shape}")
    rng = numpy_generator(seed, stream=1)
    labels = rng.permutation(np.arange(n, dtype=np.int64) % class_count)
    if separable and class_count == 2:
        centre = np.where(labels == 1, 0.5 + SEPARABLE_SHIFT, 0.5 - SEPARABLE_SHIFT)
        noise = rng.uniform(-SEPARABLE_NOISE, SEPARABLE_NOISE, size=(n, *shape))
        images = centre[:, None, None, None] + noise
    else:
        images = rng.uniform(0.0, 1.0, size=(n, *shape))
    images = np.clip(images, 0.0, 1.0).astype(precision.dtype)
    name = "synthetic-separable" if separable else "synthetic"
    return LabeledDataset(np.ascontiguousarray(images), labels, class_count, name)
