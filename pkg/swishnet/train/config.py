"""Serialisable run configuration and per-epoch metrics."""
from enum import Enum
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, NonNegativeFloat, field_validator, model_validator

from ..activations import ActivationKind
from ..core.settings import settings
from ..tensor import Precision


class ArchName(str, Enum):
    FCNN = "fcnn"
    CNN5 = "cnn5"
    CNN5_SMALL = "cnn5-small"
    VGG16 = "vgg16"

    @property
    def default_epochs(self) -> int:
        return {ArchName.FCNN: 30, ArchName.CNN5: 50, ArchName.CNN5_SMALL: 50, ArchName.VGG16: 100}[self]

    @property
    def default_patience(self) -> int | None:
        # Only the VGG16 runs use early stopping
        return 5 if self is ArchName.VGG16 else None


class DatasetName(str, Enum):
    MNIST = "mnist"
    CIFAR10 = "cifar10"
    CIFAR100 = "cifar100"
    SYNTHETIC = "synthetic"


class OptimizerKind(str, Enum):
    ADAM = "adam"
    SGD_MOMENTUM = "sgd_momentum"


class ArchSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: ArchName
    conv_activation: ActivationKind = ActivationKind.SWISHRELU
    dense_activation: ActivationKind = ActivationKind.SWISHRELU
    class_count: int = 10
    input_shape: tuple[int, int, int] = (1, 28, 28)

    @field_validator("conv_activation", "dense_activation", mode="before")
    @classmethod
    def parse_kind(cls, value: str | ActivationKind) -> ActivationKind:
        return ActivationKind.parse(value)

    @field_validator("class_count")
    @classmethod
    def check_class_count(cls, value: int) -> int:
        if value < 2:
            raise ValueError("class_count must be at least 2")
        return value


class OptimizerConfig(BaseModel):
    kind: OptimizerKind = OptimizerKind.ADAM
    learning_rate: float | None = Field(default=None, gt=0)
    momentum: float = Field(default=settings.sgd_momentum, ge=0, lt=1)
    beta1: float = Field(default=settings.adam_beta1, ge=0, lt=1)
    beta2: float = Field(default=settings.adam_beta2, ge=0, lt=1)
    epsilon: float = Field(default=settings.adam_epsilon, gt=0)

    @property
    def resolved_learning_rate(self) -> float:
        if self.learning_rate is not None:
            return self.learning_rate
        return settings.adam_lr if self.kind is OptimizerKind.ADAM else settings.sgd_lr


class TrainConfig(BaseModel):
    optimizer: OptimizerConfig = Field(default_factory=OptimizerConfig)
    epochs: int = Field(default=30, ge=1)
    batch_size: int = Field(default=settings.default_batch_size, ge=1)
    eval_batch_size: int = Field(default=256, ge=1)
    seed: int = Field(default=settings.default_seed, ge=0, lt=2**64)
    early_stopping_patience: int | None = Field(default=None, ge=1)
    precision: Precision = Precision.SINGLE
    shuffle: bool = True


class EpochMetrics(BaseModel):
    epoch: int = Field(ge=1)
    train_accuracy: float = Field(ge=0, le=1)
    train_loss: NonNegativeFloat
    test_accuracy: float = Field(ge=0, le=1)
    test_loss: NonNegativeFloat
    wall_time_seconds: NonNegativeFloat


class RunConfig(BaseModel):
    """Everything needed to replay a command; written as ``config.json``."""

    command: str
    arch: ArchSpec
    dataset: DatasetName = DatasetName.SYNTHETIC
    data_dir: Path | None = None
    train_subset: int | None = Field(default=None, ge=1)
    test_subset: int | None = Field(default=None, ge=1)
    synthetic_samples: int = Field(default=200, ge=1)
    train: TrainConfig = Field(default_factory=TrainConfig)
    rows: list[tuple[ActivationKind, ActivationKind]] = Field(default_factory=list)
    out_dir: Path

    @model_validator(mode="after")
    def check_dataset(self) -> "RunConfig":
        if self.dataset is not DatasetName.SYNTHETIC and self.data_dir is None:
            raise ValueError(f"dataset '{self.dataset.value}' needs --data-dir")
        return self
