"""Environment-based configuration using Pydantic Settings."""

from typing import Literal

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="SNPBENCH_",
        extra="ignore",
    )

    # API
    app_name: str = "SN P Workbench"
    debug: bool = False

    # Engine
    default_policy: Literal["first", "seeded", "strict"] = "first"
    default_seed: int = 0
    max_steps: int = 10_000
    snapshots: bool = False

    # Counter machines
    cm_state_cap: int = 1_000_000
    cm_max_steps: int = 5_000_000

    # Verification
    verify_workers: int = 4
    verify_max_steps: int = 200_000


settings = Settings()
