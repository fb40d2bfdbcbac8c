from .architectures import build_cnn5, build_fcnn, build_model, build_vgg16, init_parameters
from .config import (
    ArchName,
    ArchSpec,
    DatasetName,
    EpochMetrics,
    OptimizerConfig,
    OptimizerKind,
    RunConfig,
    TrainConfig,
)
from .loop import (
    TrainResult,
    dead_unit_fraction,
    evaluate,
    extract_feature_maps,
    train_model,
    train_steps,
)
from .matrix import TABLE_PRESETS, MatrixRow, parse_rows, run_experiment_matrix

__all__ = [
    "build_cnn5",
    "build_fcnn",
    "build_model",
    "build_vgg16",
    "init_parameters",
    "ArchName",
    "ArchSpec",
    "DatasetName",
    "EpochMetrics",
    "OptimizerConfig",
    "OptimizerKind",
    "RunConfig",
    "TrainConfig",
    "TrainResult",
    "dead_unit_fraction",
    "evaluate",
    "extract_feature_maps",
    "train_model",
    "train_steps",
    "TABLE_PRESETS",
    "MatrixRow",
    "parse_rows",
    "run_experiment_matrix",
]
