# app/core/config.py
from functools import lru_cache
from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="STBC_BP_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    log_level: str = "INFO"
    log_json: bool = False

    # execution only, never changes results
    workers: int = Field(default=1, ge=1)
    frame_batch: int = Field(default=64, ge=1)

    # Monte-Carlo stopping defaults
    target_bit_errors: int = Field(default=400, ge=1)
    max_frames: int = Field(default=100_000, ge=1)

    # detector numerics
    psi_floor: float = Field(default=1e-12, gt=0.0)
    noiseless_sigma2: float = Field(default=1e-4, gt=0.0)

    # exhaustive-search guards
    ml_max_k: int = Field(default=24, ge=1)
    marginals_max_k: int = Field(default=16, ge=1)

    results_dir: Path = Path("results")


@lru_cache
def get_settings() -> Settings:
    return Settings()


settings = get_settings()
