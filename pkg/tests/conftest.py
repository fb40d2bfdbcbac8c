import os

# Must be set before swishnet.core.settings is first imported
os.environ.setdefault("SWISHNET_FILE_LOGS", "false")
os.environ.setdefault("SWISHNET_PROGRESS", "false")
os.environ.setdefault("SWISHNET_THREADS", "1")

import numpy as np
import pytest
from hypothesis import settings as hypothesis_settings

from swishnet.core.settings import settings
from swishnet.data import make_synthetic
from swishnet.tensor import Precision

hypothesis_settings.register_profile("ci", max_examples=50, deadline=None)
hypothesis_settings.register_profile("dev", max_examples=200, deadline=None)
hypothesis_settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "ci"))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def separable_mnist_shaped():
    """200 two-class samples shaped like MNIST, plus a held-out 100."""
    train = make_synthetic(200, (1, 28, 28), 2, seed=11, separable=True)
    test = make_synthetic(100, (1, 28, 28), 2, seed=12, separable=True)
    return train, test


@pytest.fixture
def double_batch():
    data = make_synthetic(4, (1, 28, 28), 10, seed=5, precision=Precision.DOUBLE)
    return data.images, data.labels


def dataset_dir(name: str):
    path = getattr(settings, f"{name}_dir")
    if path is None or not path.exists():
        pytest.skip(f"set SWISHNET_{name.upper()}_DIR to run this target")
    return path
