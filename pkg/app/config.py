from pathlib import Path
from typing import Optional

from pydantic_settings import BaseSettings

DEFAULT_DATA_DIR = str(Path(__file__).resolve().parent / "data")


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Series
    tau_cache_dir: Optional[str] = None
    max_series_limit: int = 200_000
    default_series_limit: int = 10_000

    # Factorization budget
    trial_limit: int = 1_000_000
    rho_rounds: int = 1_000_000

    # Sieve
    sieve_modulus: int = 396
    ell_bound: int = 200
    data_dir: str = DEFAULT_DATA_DIR

    # Campaigns
    campaign_backend: str = "threads"
    campaign_threads: int = 4
    campaign_task_time_limit: int = 3600
    worker_concurrency: int = 2

    # Celery
    celery_broker_url: str = "redis://localhost:6379/0"
    celery_result_backend: str = "redis://localhost:6379/0"

    # Application
    log_level: str = "INFO"
    app_title: str = "Tau Odd-Values Verifier"

    class Config:
        env_file = ".env"
        case_sensitive = False


settings = Settings()
