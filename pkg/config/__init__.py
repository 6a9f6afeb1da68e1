from .logging_conf import configure_logging
from .settings import NumericSettings, get_settings

__all__ = ["NumericSettings", "configure_logging", "get_settings"]
