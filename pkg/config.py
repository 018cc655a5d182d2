# ============================================================================
# MODULE CONTEXT - APPLICATION CONFIGURATION
# ============================================================================
# STATUS: Core Infrastructure - Configuration Management
# PURPOSE: Environment-driven defaults for tolerances, solver and Monte Carlo settings
# EXPORTS: AppConfig, get_app_config, validate_configuration
# DEPENDENCIES: pydantic-settings, pydantic
# SOURCE: Environment variables prefixed QHEDGE_, optional .env file
# PATTERNS: Singleton pattern for config
# ============================================================================

"""
Application Configuration Module

Central defaults that every package falls back to when a caller (or a
TOML run file) does not supply its own value.

Environment Variables (all optional):
    QHEDGE_LOG_LEVEL            default log level (WARNING)
    QHEDGE_DEBUG_LOGGING        force DEBUG logging (false)
    QHEDGE_QUAD_ABS_TOL         quadrature absolute tolerance (1e-9)
    QHEDGE_QUAD_REL_TOL         quadrature relative tolerance (1e-10)
    QHEDGE_QUAD_TRUNC_SIGMAS    integration half-width in standard deviations (8.5)
    QHEDGE_QUAD_MAX_SUBDIVISIONS adaptive subdivision cap (16384)
    QHEDGE_SOLVER_BUDGET_REL_TOL residual tolerance for Psi2(c) = x, relative to p(H) (1e-8)
    QHEDGE_SOLVER_RISK_TOL      residual tolerance for Psi1(c) = 1 - alpha (1e-8)
    QHEDGE_SOLVER_BRACKET_CAP   bracket limit as a multiple of 1/p(H) (1e12)
    QHEDGE_SOLVER_MAX_ITERATIONS bisection iteration cap (200)
    QHEDGE_MC_PATHS             Monte Carlo sample count (1000000)
    QHEDGE_MC_SEED              Monte Carlo seed (20240601)
    QHEDGE_MC_CHUNK_SIZE        draws per generator block (65536)
    QHEDGE_VERIFY_SIGMAS        standard errors allowed in verify checks (3.0)

Usage:
    from config import get_app_config

    tol = get_app_config().quad_abs_tol
"""

import logging
from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import Field, model_validator

logger = logging.getLogger(__name__)

# ============================================================================
# Application Configuration
# ============================================================================

class AppConfig(BaseSettings):
    """
    Application-wide defaults loaded from environment variables.
    """

    # Logging
    log_level: str = Field(default="WARNING", description="Default log level")
    debug_logging: bool = Field(default=False, description="Force DEBUG logging")

    # Quadrature
    quad_abs_tol: float = Field(default=1e-9, gt=0, description="Absolute quadrature tolerance")
    quad_rel_tol: float = Field(default=1e-10, ge=0, description="Relative quadrature tolerance")
    quad_trunc_sigmas: float = Field(default=8.5, ge=6, description="Integration half-width in sd")
    quad_max_subdivisions: int = Field(default=2 ** 14, ge=1, description="Adaptive subdivision cap")

    # Solver
    solver_budget_rel_tol: float = Field(default=1e-8, gt=0, description="Psi2 residual / p(H)")
    solver_risk_tol: float = Field(default=1e-8, gt=0, description="Psi1 residual")
    solver_bracket_cap: float = Field(default=1e12, gt=1, description="Bracket cap times 1/p(H)")
    solver_max_iterations: int = Field(default=200, ge=10, description="Bisection iteration cap")

    # Monte Carlo
    mc_paths: int = Field(default=10 ** 6, ge=1, description="Monte Carlo sample count")
    mc_seed: int = Field(default=20240601, ge=0, description="Monte Carlo seed")
    mc_chunk_size: int = Field(default=2 ** 16, ge=1, description="Draws per generator block")

    # Verification
    verify_sigmas: float = Field(default=3.0, gt=0, description="SE multiple for MC checks")

    model_config = SettingsConfigDict(
        env_prefix="QHEDGE_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore"
    )

    @model_validator(mode='after')
    def validate_log_level(self):
        """Reject log levels the logging module does not know."""
        if self.log_level.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"QHEDGE_LOG_LEVEL must be a standard level, got {self.log_level!r}")
        return self

    @property
    def effective_log_level(self) -> str:
        return "DEBUG" if self.debug_logging else self.log_level.upper()


@lru_cache(maxsize=1)
def get_app_config() -> AppConfig:
    """
    Get singleton application configuration instance.

    Raises:
        ValidationError: If an environment override is malformed
    """
    return AppConfig()


def validate_configuration() -> bool:
    """Log the resolved defaults; raises if the environment is malformed."""
    try:
        config = get_app_config()
        logger.info("Configuration validation:")
        logger.info(f"  Quadrature: abs_tol={config.quad_abs_tol} rel_tol={config.quad_rel_tol} "
                    f"trunc_sigmas={config.quad_trunc_sigmas}")
        logger.info(f"  Solver: max_iterations={config.solver_max_iterations}")
        logger.info(f"  Monte Carlo: paths={config.mc_paths} seed={config.mc_seed}")
        return True
    except Exception as e:
        logger.error(f"Configuration validation failed: {e}")
        raise


if __name__ == "__main__":
    logging.basicConfig(level=logging.INFO)
    validate_configuration()
