"""
Configuration settings for qpart
"""

from pathlib import Path
from typing import Optional

import psutil
from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from qpart import __version__


DATA_DIR = Path(__file__).resolve().parent.parent / "data"


class Settings(BaseSettings):
    """Application settings"""

    model_config = SettingsConfigDict(
        env_prefix="QPART_",
        env_file=".env",
        case_sensitive=True,
        extra="ignore",
    )

    # Application settings
    APP_NAME: str = "qpart"
    VERSION: str = __version__

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "text"  # text or json

    # Parallelism (QPART_THREADS); None means one worker per physical core
    THREADS: Optional[int] = None

    # Resource caps
    STATEVECTOR_QUBIT_CAP: int = 24
    BRUTE_FORCE_QUBIT_CAP: int = 24
    ELIMINATION_ORACLE_CAP: int = 200

    # Spectral coarsening
    DENSE_EIGEN_LIMIT: int = 400

    # Nested dissection
    MIN_BLOCK_SIZE: int = 32

    # Objective defaults
    DEFAULT_LAMBDA: float = 1.0
    DEFAULT_NU: float = 0.05

    # Ramp-parameter presets
    PRESET_FILE: Path = DATA_DIR / "delta_presets.json"

    @field_validator("LOG_FORMAT")
    @classmethod
    def validate_log_format(cls, v: str) -> str:
        if v not in ("text", "json"):
            raise ValueError("LOG_FORMAT must be 'text' or 'json'")
        return v

    @field_validator("LOG_LEVEL")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        return v.upper()

    @field_validator(
        "STATEVECTOR_QUBIT_CAP",
        "BRUTE_FORCE_QUBIT_CAP",
        "ELIMINATION_ORACLE_CAP",
        "DENSE_EIGEN_LIMIT",
        "MIN_BLOCK_SIZE",
    )
    @classmethod
    def validate_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("caps and sizes must be positive")
        return v

    @field_validator("THREADS")
    @classmethod
    def validate_threads(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v < 1:
            raise ValueError("QPART_THREADS must be at least 1")
        return v

    @property
    def worker_count(self) -> int:
        """Number of workers for internal thread pools"""
        if self.THREADS is not None:
            return self.THREADS
        return psutil.cpu_count(logical=False) or 1


# Create settings instance
settings = Settings()
