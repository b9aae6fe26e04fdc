"""Application configuration using pydantic-settings."""

from functools import lru_cache
from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from mimodof.models import Tolerance
from mimodof.simulate import decade_powers


class Settings(BaseSettings):
    """Numerical defaults loaded from environment."""

    model_config = SettingsConfigDict(
        env_prefix="MIMODOF_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
    )

    # Numerics
    rank_rel_tol: float = Field(default=1e-10, description="Relative singular-value cutoff")
    zero_rel_tol: float = Field(default=1e-8, description="Relative residual for required zeros")
    condition_limit: float = Field(default=1e8, description="Largest accepted condition number")

    # Simulation
    seed: int = Field(default=0, ge=0)
    trials: int = Field(default=100, ge=1)
    powers: list[float] = Field(default_factory=decade_powers, description="Slope power grid")
    workers: int = Field(default=1, ge=1, description="Monte Carlo thread pool size")

    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = Field(default="WARNING")

    def tolerance(self) -> Tolerance:
        return Tolerance(rank_rel_tol=self.rank_rel_tol, zero_rel_tol=self.zero_rel_tol)


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
