from .datasets import BatchPlan, LabeledDataset, make_synthetic, plan_batches
from .loaders import load_cifar10_bin, load_cifar100_bin, load_mnist_idx, load_split

__all__ = [
    "BatchPlan",
    "LabeledDataset",
    "make_synthetic",
    "plan_batches",
    "load_cifar10_bin",
    "load_cifar100_bin",
    "load_mnist_idx",
    "load_split",
]
