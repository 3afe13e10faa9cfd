"""
Application configuration using Pydantic settings
"""

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings"""

    model_config = SettingsConfigDict(env_file=".env", case_sensitive=True, extra="ignore")

    # App settings
    APP_NAME: str = "coxcell"
    VERSION: str = "1.0.0"
    DEBUG: bool = False
    ENVIRONMENT: str = "production"
    LOG_LEVEL: str = "INFO"

    # Parallelism cap for grid points and trial chunks
    COXCELL_THREADS: int = 1

    # Quadrature tolerances per nesting level (outer, middle, inner)
    QUAD_OUTER_REL_TOL: float = 1e-6
    QUAD_MIDDLE_REL_TOL: float = 1e-7
    QUAD_INNER_REL_TOL: float = 1e-8
    QUAD_ABS_TOL: float = 1e-12
    QUAD_SUBDIVISION_LIMIT: int = 200

    # Outer radial integrals are split where the survival prefactor drops below this
    OUTER_SURVIVAL_CUTOFF: float = 1e-16

    # Monte Carlo
    DEFAULT_TRIALS: int = 100_000
    DEFAULT_SEED: int = 20180417
    MAX_RESAMPLE_ATTEMPTS: int = 100
    TAIL_EPSILON: float = 1e-3
    MAX_WINDOW_POINTS: float = 50_000.0
    TRIAL_CHUNK_SIZE: int = 2_000

    # Conditioning and comparison
    DEGENERATE_CONDITIONING_FLOOR: float = 1e-12
    COMPARE_MAX_ABS_Z: float = 4.0

    # User intensities used when a run does not set them (only the mixture weights depend on them)
    DEFAULT_LAMBDA_U: float = 10.0
    DEFAULT_MU_U: float = 2.0

    @field_validator("ENVIRONMENT")
    @classmethod
    def validate_environment(cls, v):
        if v not in ["development", "staging", "production"]:
            raise ValueError("Environment must be development, staging, or production")
        return v

    @field_validator("DEBUG", mode="before")
    @classmethod
    def debug_from_env(cls, v):
        if isinstance(v, str):
            return v.lower() in ("true", "1", "yes", "on")
        return v

    @field_validator("COXCELL_THREADS")
    @classmethod
    def validate_threads(cls, v):
        if v < 1:
            raise ValueError("COXCELL_THREADS must be at least 1")
        return v

    @field_validator("TAIL_EPSILON")
    @classmethod
    def validate_tail_epsilon(cls, v):
        if not 0.0 < v < 1.0:
            raise ValueError("TAIL_EPSILON must lie in (0, 1)")
        return v

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        # Development runs log everything
        if self.ENVIRONMENT == "development":
            self.DEBUG = True


# Global settings instance
settings = Settings()
