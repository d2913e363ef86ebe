# wllab/config.py
"""
wllab - Configuration
Environment-aware caps, seeds and logging for the refinement library
"""

from contextlib import contextmanager
from typing import Any, Dict, Iterator, Optional

from pydantic import ValidationError as PydanticValidationError, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .exceptions import ConfigurationError


class Settings(BaseSettings):
    """Library settings loaded from WLLAB_* environment variables"""

    model_config = SettingsConfigDict(
        env_prefix="WLLAB_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
        validate_assignment=True,
    )

    # =============================================================================
    # SIZE CAPS
    # =============================================================================
    CAP_TUPLES: int = 2 ** 24          # n^k entries of one dense partition
    CAP_SIM: int = 2 ** 20             # points searched by the exact similarity fallback
    CAP_SYMBOLIC_DIM: int = 10         # intertwiner dimension for symbolic determinants
    CAP_COLOURS: int = 64              # colours handled by algebraic isomorphism search
    CAP_BRUTE_FORCE: int = 8           # vertices for the orbit oracle
    CAP_ISOMORPHISM: int = 64          # vertices for brute-force isomorphism
    CAP_EP_N: int = 6
    CAP_EP_K: int = 2
    CAP_CFI_DEGREE: int = 6

    # =============================================================================
    # RANDOMIZED PROBING
    # =============================================================================
    SEED: int = 20240607
    SIM_RANDOM_TRIES: int = 16
    SIM_COEFF_RANGE: int = 1000

    # =============================================================================
    # EXECUTION
    # =============================================================================
    MAX_CONCURRENT_JOBS: int = 4
    EXTENDED: bool = False
    LOG_LEVEL: str = "INFO"

    @field_validator(
        "CAP_TUPLES", "CAP_SIM", "CAP_SYMBOLIC_DIM", "CAP_COLOURS", "CAP_BRUTE_FORCE",
        "CAP_ISOMORPHISM", "CAP_EP_N", "CAP_EP_K", "CAP_CFI_DEGREE",
        "SIM_RANDOM_TRIES", "SIM_COEFF_RANGE", "MAX_CONCURRENT_JOBS",
    )
    @classmethod
    def validate_positive(cls, v):
        """Caps and counts must be positive"""
        if v <= 0:
            raise ValueError("value must be positive")
        return v

    @field_validator("LOG_LEVEL", mode="before")
    @classmethod
    def normalize_log_level(cls, v):
        """Accept any case, reject unknown level names"""
        level = str(v).upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"unknown log level {v!r}")
        return level

    def cap(self, name: str, override: Optional[int] = None) -> int:
        """Resolve a cap, preferring an explicit override"""
        if override is not None:
            return override
        return getattr(self, f"CAP_{name.upper()}")


# Global settings instance
settings = Settings()

DEFAULT_CAPS: Dict[str, int] = {
    name: field.default
    for name, field in Settings.model_fields.items()
    if name.startswith("CAP_")
}


def apply_overrides(**overrides: Any) -> Settings:
    """
    Assign validated overrides onto the global settings instance

    Raises:
        ConfigurationError: A value fails validation
    """
    for key, value in overrides.items():
        if value is None:
            continue
        try:
            setattr(settings, key.upper(), value)
        except PydanticValidationError as e:
            raise ConfigurationError(
                e.errors()[0]["msg"], config_key=key.upper(), config_value=value,
            ) from e
    return settings


def get_logging_config(level: Optional[str] = None) -> Dict[str, Any]:
    """Get a dictConfig logging configuration"""
    level = (level or settings.LOG_LEVEL).upper()
    return {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {
            "default": {
                "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
            },
            "detailed": {
                "format": "%(asctime)s - %(name)s - %(levelname)s - %(module)s - %(funcName)s - %(message)s",
            },
        },
        "handlers": {
            "console": {
                "formatter": "detailed" if level == "DEBUG" else "default",
                "class": "logging.StreamHandler",
                "stream": "ext://sys.stderr",
            }
        },
        "root": {
            "level": "WARNING",
            "handlers": ["console"],
        },
        "loggers": {
            "wllab": {
                "level": level,
                "handlers": ["console"],
                "propagate": False,
            },
        },
    }


def get_environment_config() -> Dict[str, Any]:
    """Summary of the active settings for run reports"""
    return {
        "caps": {name: getattr(settings, name) for name in DEFAULT_CAPS},
        "seed": settings.SEED,
        "sim_random_tries": settings.SIM_RANDOM_TRIES,
        "extended": settings.EXTENDED,
        "log_level": settings.LOG_LEVEL,
    }


@contextmanager
def override_settings(**overrides: Any) -> Iterator[Settings]:
    """Temporarily assign overrides, restoring the previous values on exit"""
    saved = {key.upper(): getattr(settings, key.upper()) for key, value in overrides.items() if value is not None}
    try:
        yield apply_overrides(**overrides)
    finally:
        for key, value in saved.items():
            setattr(settings, key, value)
