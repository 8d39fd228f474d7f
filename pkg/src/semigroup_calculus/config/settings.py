from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv

BASE_DIR = Path(__file__).resolve().parents[3]
ENV_PATH = BASE_DIR / ".env"
load_dotenv(ENV_PATH)

APP_NAME = os.getenv("APP_NAME", "Semigroup Calculus")


def _env_float(name: str, default: float) -> float:
    return float(os.getenv(name, str(default)))


def _env_int(name: str, default: int) -> int:
    return int(os.getenv(name, str(default)))


@dataclass(frozen=True)
class Settings:
    app_name: str = APP_NAME
    rel_tol: float = _env_float("CALCULUS_REL_TOL", 1e-10)
    abs_tol: float = _env_float("CALCULUS_ABS_TOL", 1e-12)
    max_panels: int = _env_int("CALCULUS_MAX_PANELS", 4096)
    panel_order: int = _env_int("CALCULUS_PANEL_ORDER", 32)
    oracle_condition_limit: float = _env_float("CALCULUS_ORACLE_CONDITION_LIMIT", 1e8)
    resolvent_condition_limit: float = _env_float("CALCULUS_RESOLVENT_CONDITION_LIMIT", 1e12)
    certification_horizon: float = _env_float("CALCULUS_CERTIFICATION_HORIZON", 60.0)
    certification_points: int = _env_int("CALCULUS_CERTIFICATION_POINTS", 240)
    levy_split: float = _env_float("CALCULUS_LEVY_SPLIT", 1.0)
    dense_limit: int = _env_int("CALCULUS_DENSE_LIMIT", 64)
    output_dir: Path = Path(os.getenv("CALCULUS_OUTPUT_DIR", "output"))
    log_level: str = os.getenv("CALCULUS_LOG_LEVEL", "WARNING")

    def __print__(self) -> str:
        return (
            f"Settings(app_name={self.app_name}, "
            f"rel_tol={self.rel_tol}, abs_tol={self.abs_tol}, "
            f"max_panels={self.max_panels}, panel_order={self.panel_order}, "
            f"oracle_condition_limit={self.oracle_condition_limit}, "
            f"certification_horizon={self.certification_horizon}, "
            f"output_dir={self.output_dir}, log_level={self.log_level})"
        )


settings = Settings()


def refresh_settings() -> Settings:
    """Rebuild the settings object from the current environment."""

    global settings  # noqa: PLW0603 - module-level singleton

    load_dotenv(ENV_PATH, override=False)
    settings = Settings(
        app_name=os.getenv("APP_NAME", APP_NAME),
        rel_tol=_env_float("CALCULUS_REL_TOL", 1e-10),
        abs_tol=_env_float("CALCULUS_ABS_TOL", 1e-12),
        max_panels=_env_int("CALCULUS_MAX_PANELS", 4096),
        panel_order=_env_int("CALCULUS_PANEL_ORDER", 32),
        oracle_condition_limit=_env_float("CALCULUS_ORACLE_CONDITION_LIMIT", 1e8),
        resolvent_condition_limit=_env_float("CALCULUS_RESOLVENT_CONDITION_LIMIT", 1e12),
        certification_horizon=_env_float("CALCULUS_CERTIFICATION_HORIZON", 60.0),
        certification_points=_env_int("CALCULUS_CERTIFICATION_POINTS", 240),
        levy_split=_env_float("CALCULUS_LEVY_SPLIT", 1.0),
        dense_limit=_env_int("CALCULUS_DENSE_LIMIT", 64),
        output_dir=Path(os.getenv("CALCULUS_OUTPUT_DIR", "output")),
        log_level=os.getenv("CALCULUS_LOG_LEVEL", "WARNING"),
    )
    return settings


def get_settings() -> Settings:
    return settings
