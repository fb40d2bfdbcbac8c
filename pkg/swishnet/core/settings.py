from pathlib import Path

from dotenv import load_dotenv
from pydantic import Field, computed_field
from pydantic_settings import BaseSettings, SettingsConfigDict

load_dotenv(override=True)


class Settings(BaseSettings):
    # Runtime
    threads: int = Field(default=1, ge=1)
    default_seed: int = 42
    runs_dir: Path = Path("runs")

    # Logging
    log_level: str = "INFO"
    file_logs: bool = True
    log_dir: Path = Path("logs")
    progress: bool = True

    # Training defaults
    default_batch_size: int = 64
    adam_lr: float = 0.001
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    sgd_lr: float = 0.01
    sgd_momentum: float = 0.9

    # Benchmarks
    bench_elements: int = 10_000_000
    bench_reps: int = 9
    bench_sign_mix: float = 0.5

    # Optional dataset locations used by the long-running test targets
    mnist_dir: Path | None = None
    cifar10_dir: Path | None = None

    @computed_field
    @property
    def deterministic(self) -> bool:
        """Bitwise reproducibility is only promised for a single worker thread"""
        return self.threads == 1

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        # SWISHNET_THREADS overrides threads, SWISHNET_LOG_LEVEL overrides log_level, ...
        env_prefix="SWISHNET_",
        extra="ignore",
    )


settings = Settings()
