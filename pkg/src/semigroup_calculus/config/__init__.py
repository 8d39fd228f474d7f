from .run_config import InvalidRunConfig, RunConfig, load_run_config
from .settings import Settings, get_settings, refresh_settings

__all__ = ["InvalidRunConfig", "RunConfig", "Settings", "get_settings", "load_run_config", "refresh_settings"]
