# app/config/settings.py
"""
Toolkit configuration using pydantic-settings (pydantic v2 style).

Every numeric check in the services reads its default tolerance, transform
kernel and enumeration limits from here. Values come from environment
variables prefixed with VILENKIN_ or from a local .env file; none is required.
"""
from __future__ import annotations

import logging
from typing import Literal, Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

logger = logging.getLogger(__name__)


class Settings(BaseSettings):
    """
    Toolkit configuration loaded from environment.

    Relevant environment variables:
      - VILENKIN_EPS
      - VILENKIN_TRANSFORM
      - VILENKIN_DEFAULT_M_MAX
      - VILENKIN_ATLAS_BUDGET
      - VILENKIN_WORKERS
      - VILENKIN_LOG_LEVEL
    """

    model_config = SettingsConfigDict(
        env_prefix="VILENKIN_", env_file=".env", extra="ignore"
    )

    # tolerance for "vanishes" and "equals one" decisions
    eps: float = Field(default=1e-9)

    # Fourier kernel used when a caller does not pick one
    transform: Literal["fast", "naive"] = Field(default="fast")

    # cap for the scaling-function search; None means p - 1
    default_m_max: Optional[int] = Field(default=None)

    # enumeration guard for the elementary-pattern atlas
    atlas_budget: int = Field(default=20000)
    workers: int = Field(default=1)

    log_level: str = Field(default="INFO")

    # --- validators / post-init checks ---
    @field_validator("eps")
    @classmethod
    def check_eps(cls, v: float) -> float:
        if not (0.0 < v <= 1e-3):
            raise ValueError(f"eps must lie in (0, 1e-3], got {v!r}")
        return v

    @field_validator("transform", mode="before")
    @classmethod
    def lower_transform(cls, v: str) -> str:
        return v.strip().lower() if isinstance(v, str) else v

    @field_validator("default_m_max")
    @classmethod
    def check_m_max(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v < 0:
            raise ValueError("default_m_max must be non-negative")
        return v

    @field_validator("atlas_budget", "workers")
    @classmethod
    def check_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("must be at least 1")
        return v

    @field_validator("log_level")
    @classmethod
    def check_log_level(cls, v: str) -> str:
        level = v.strip().upper()
        if level not in logging.getLevelNamesMapping():
            raise ValueError(f"unknown log level {v!r}")
        return level

    def model_post_init(self, __context) -> None:  # pydantic v2 hooks
        """
        Notices about unusual values go to the log, not to stdout.
        """
        if self.eps > 1e-6:
            logger.warning(
                "eps=%g is loose; zero-set and orthonormality decisions may accept near misses",
                self.eps,
            )
        if self.transform == "naive":
            logger.info(
                "Naive O(p^(2(N+M))) transform selected; large grids will be slow."
            )

    def resolve_m_max(self, p: int) -> int:
        """Cap for the scaling-function search at prime p."""
        return self.default_m_max if self.default_m_max is not None else p - 1


# single exporter
settings = Settings()
