import os
import logging
from dataclasses import dataclass

from dotenv import load_dotenv

from models.errors import DomainError

# Load environment variables from .env file
load_dotenv()

logger = logging.getLogger(__name__)


def _int_env(name: str, default: int, minimum: int = 0) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == '':
        return default
    try:
        value = int(raw)
    except ValueError:
        raise DomainError(f"{name} must be an integer, got {raw!r}")
    if value < minimum:
        raise DomainError(f"{name} must be at least {minimum}, got {value}")
    return value


@dataclass(frozen=True)
class AnalysisSettings:
    max_ground_size: int = 20
    exhaustive_verify_max_n: int = 14
    verify_samples: int = 10000
    solution_cap_log2: int = 20
    family_cap_log2: int = 24
    seed: int = 0
    log_level: str = 'WARNING'
    log_file: str = ''

    @classmethod
    def from_env(cls) -> 'AnalysisSettings':
        """Read settings from the environment (and .env, if present)"""
        level = os.getenv('SDSUB_LOG_LEVEL', cls.log_level).upper()
        if level not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
            raise DomainError(f"SDSUB_LOG_LEVEL must be a logging level name, got {level!r}")
        return cls(
            max_ground_size=_int_env('SDSUB_MAX_GROUND_SIZE', cls.max_ground_size, minimum=1),
            exhaustive_verify_max_n=_int_env('SDSUB_EXHAUSTIVE_VERIFY_MAX_N', cls.exhaustive_verify_max_n),
            verify_samples=_int_env('SDSUB_VERIFY_SAMPLES', cls.verify_samples, minimum=1),
            solution_cap_log2=_int_env('SDSUB_SOLUTION_CAP_LOG2', cls.solution_cap_log2),
            family_cap_log2=_int_env('SDSUB_FAMILY_CAP_LOG2', cls.family_cap_log2),
            seed=_int_env('SDSUB_SEED', cls.seed),
            log_level=level,
            log_file=os.getenv('SDSUB_LOG_FILE', ''),
        )


_settings = None


def get_settings() -> AnalysisSettings:
    """Process-wide settings, read from the environment on first use"""
    global _settings
    if _settings is None:
        _settings = AnalysisSettings.from_env()
        logger.debug(f"Loaded settings: {_settings}")
    return _settings


def override_settings(settings: AnalysisSettings) -> None:
    global _settings
    _settings = settings
