"""Activation-comparison experiment matrix and its comparison-table presets."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

from pydantic import BaseModel

from ..activations import ActivationKind
from ..core.exceptions import DivergenceError, invalid_parameter
from ..core.settings import settings
from ..data import LabeledDataset
from ..logger import logger
from .architectures import build_model, init_parameters
from .config import ArchName, ArchSpec, DatasetName, EpochMetrics, TrainConfig
from .loop import TrainResult, train_model

ActivationRow = tuple[ActivationKind, ActivationKind]

_COMPARED = (
    ActivationKind.RELU,
    ActivationKind.ELU,
    ActivationKind.SELU,
    ActivationKind.TANH,
    ActivationKind.SWISHRELU,
)


@dataclass(frozen=True)
class TablePreset:
    arch: ArchName
    dataset: DatasetName
    rows: tuple[ActivationRow, ...]


TABLE_PRESETS: dict[int, TablePreset] = {
    1: TablePreset(ArchName.FCNN, DatasetName.MNIST, tuple((k, k) for k in _COMPARED)),
    2: TablePreset(ArchName.CNN5, DatasetName.CIFAR10, tuple((k, k) for k in _COMPARED)),
    3: TablePreset(ArchName.CNN5, DatasetName.CIFAR100, tuple((k, k) for k in _COMPARED)),
    4: TablePreset(ArchName.CNN5, DatasetName.CIFAR10, tuple((k, ActivationKind.SWISHRELU) for k in _COMPARED)),
    5: TablePreset(ArchName.CNN5, DatasetName.CIFAR100, tuple((k, ActivationKind.SWISHRELU) for k in _COMPARED)),
}


def parse_rows(text: str) -> list[ActivationRow]:
    """``"relu:swishrelu,elu"`` -> [(relu, swishrelu), (elu, elu)]; a bare kind applies to both groups."""
    rows: list[ActivationRow] = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        conv, _, dense = chunk.partition(":")
        conv_kind = ActivationKind.parse(conv)
        rows.append((conv_kind, ActivationKind.parse(dense) if dense else conv_kind))
    if not rows:
        raise invalid_parameter("rows", "expected at least one conv:dense activation pair")
    return rows


class MatrixRow(BaseModel):
    index: int
    conv_activation: ActivationKind
    dense_activation: ActivationKind
    final: EpochMetrics | None = None
    epochs_run: int = 0
    stopped_early_at: int | None = None
    diverged: bool = False
    error: str | None = None


RowCallback = Callable[[int, ArchSpec, TrainResult | None, DivergenceError | None], None]


def run_experiment_matrix(
    arch: ArchName,
    train_set: LabeledDataset,
    test_set: LabeledDataset,
    activation_rows: Sequence[ActivationRow],
    config: TrainConfig,
    *,
    threads: int | None = None,
    on_row: RowCallback | None = None,
) -> list[MatrixRow]:
    """One full training run per row with the same seed and config.

    Every row rebuilds its model from the shared seed, so initial weights and
    batch orders are identical across rows and the activation pair is the only
    difference. Divergent rows are recorded and the matrix carries on.
    """
    if not activation_rows:
        raise invalid_parameter("rows", "expected at least one activation row")
    workers = threads or settings.threads

    def run(index: int, row: ActivationRow) -> MatrixRow:
        conv, dense = row
        spec = ArchSpec(
            name=arch,
            conv_activation=conv,
            dense_activation=dense,
            class_count=train_set.class_count,
            input_shape=train_set.sample_shape,
        )
        label = f"row {index} {conv.value}/{dense.value}"
        model = init_parameters(build_model(spec, config.precision), config.seed)
        outcome = MatrixRow(index=index, conv_activation=conv, dense_activation=dense)
        try:
            result = train_model(model, train_set, test_set, config, label=label)
        except DivergenceError as e:
            logger.error(f"{label}: {e.message}")
            outcome.diverged = True
            outcome.error = e.message
            outcome.epochs_run = len(e.partial_metrics)
            outcome.final = e.partial_metrics[-1] if e.partial_metrics else None
            if on_row is not None:
                on_row(index, spec, None, e)
            return outcome
        outcome.final = result.final
        outcome.epochs_run = len(result.metrics)
        outcome.stopped_early_at = result.stopped_early_at
        if on_row is not None:
            on_row(index, spec, result, None)
        return outcome

    logger.info(f"matrix: {len(activation_rows)} rows of {arch.value} on {workers} worker thread(s)")
    if workers == 1:
        return [run(index, row) for index, row in enumerate(activation_rows)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run, index, row) for index, row in enumerate(activation_rows)]
        return [future.result() for future in futures]
