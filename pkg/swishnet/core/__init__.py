from .settings import settings, Settings
from .exceptions import SwishNetError

__all__ = ["settings", "Settings", "SwishNetError"]
