# Environment and config
"""
Centralized runtime configuration using pydantic-settings.
Loads TMDREEF_* environment variables, optionally from a .env file.

Experiment content (building, bounds, CRO parameters) does not live here;
it comes from the YAML experiment documents read by tmdreef.core.experiment.
"""
from functools import lru_cache
from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict

PACKAGE_DATA_DIR = Path(__file__).resolve().parent.parent / "data"


class Settings(BaseSettings):
    """Process settings loaded from environment variables."""

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    # Output
    OUTPUT_DIR: Path = Path("results")

    # Parallelism
    EVAL_WORKERS: int = 1  # threads evaluating larvae within one spawn phase
    SEED_JOBS: int = 1     # joblib jobs over independent seeds

    # Application Settings
    SHOW_PROGRESS: bool = True
    DATA_DIR: Path = PACKAGE_DATA_DIR
    TIME_DOMAIN_MAX_HORIZON: float = 600.0  # seconds of simulated time

    model_config = SettingsConfigDict(
        env_prefix="TMDREEF_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
    )


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Get or create the global settings instance."""
    return Settings()
