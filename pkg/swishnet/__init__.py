"""SwishReLU activation experiments on a small numpy neural-network core."""
from .activations import ActivationKind
from .core.exceptions import SwishNetError
from .core.settings import settings
from .tensor import Precision

__version__ = "0.1.0"

__all__ = ["ActivationKind", "Precision", "SwishNetError", "settings", "__version__"]
