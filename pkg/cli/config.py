# ============================================================================
# MODULE CONTEXT - RUN CONFIGURATION
# ============================================================================
# STATUS: Configuration - one CLI run
# PURPOSE: Load a TOML run file, apply command-line overrides, validate
# EXPORTS: RunConfig, QuadratureSection, SolverSection, MonteCarloSection,
#          GridSection, load_run_config, parse_grid
# PYDANTIC_MODELS: RunConfig and its sections
# DEPENDENCIES: tomllib, pydantic, market, payoffs, gaussian, quantile_solver
# ============================================================================

"""
Run configuration.

A run file has one table per module; everything except ``[market]`` and
``[payoff]`` may be omitted, in which case the application defaults from
``config.AppConfig`` apply:

    [market]
    s0_1 = 100.0
    s0_2 = 100.0
    alpha_1 = 0.10
    alpha_2 = 0.08
    sigma_1 = 0.2
    sigma_2 = 0.3
    rho = 0.5
    r = 0.05
    T = 1.0

    [payoff]
    kind = "digital"
    strike = 100.0

    [quadrature]        # abs_tol, rel_tol, trunc_sigmas, max_subdivisions
    [solver]            # budget_rel_tol, risk_tol, bracket_cap, max_iterations
    [monte_carlo]       # n, seed
    [grids]             # c, x, alpha

Command-line flags override file values key by key before validation.
"""

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from config import get_app_config
from exceptions import InvalidParameter
from gaussian import QuadratureSpec
from market import MarketParams
from payoffs import Payoff
from quantile_solver import SolverSettings


def _drop_unset(values: Dict[str, Any]) -> Dict[str, Any]:
    return {k: v for k, v in values.items() if v is not None}


class QuadratureSection(BaseModel):
    """Optional overrides of the quadrature defaults."""
    model_config = ConfigDict(extra="forbid")

    abs_tol: Optional[float] = Field(default=None, gt=0, description="Absolute error target")
    rel_tol: Optional[float] = Field(default=None, ge=0, description="Relative error target")
    trunc_sigmas: Optional[float] = Field(default=None, ge=6, description="Window half-width in sd")
    max_subdivisions: Optional[int] = Field(default=None, ge=1, description="Subinterval cap")

    def to_spec(self) -> QuadratureSpec:
        return QuadratureSpec(**_drop_unset(self.model_dump()))


class SolverSection(BaseModel):
    """Optional overrides of the solver defaults."""
    model_config = ConfigDict(extra="forbid")

    budget_rel_tol: Optional[float] = Field(default=None, gt=0)
    risk_tol: Optional[float] = Field(default=None, gt=0)
    bracket_cap: Optional[float] = Field(default=None, gt=1)
    max_iterations: Optional[int] = Field(default=None, ge=10)

    def to_settings(self) -> SolverSettings:
        return SolverSettings(**_drop_unset(self.model_dump()))


class MonteCarloSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int = Field(default_factory=lambda: get_app_config().mc_paths, ge=1, description="Sample count")
    seed: int = Field(default_factory=lambda: get_app_config().mc_seed, ge=0, description="Generator key")


class GridSection(BaseModel):
    """Evaluation grids; each must be strictly increasing."""
    model_config = ConfigDict(extra="forbid")

    c: Optional[List[float]] = Field(default=None, description="Levels c for psi")
    x: Optional[List[float]] = Field(default=None, description="Budgets x for phi1")
    alpha: Optional[List[float]] = Field(default=None, description="Risk levels for phi2")

    @field_validator("c", "x", "alpha")
    @classmethod
    def strictly_increasing(cls, grid: Optional[List[float]]) -> Optional[List[float]]:
        if grid is None:
            return grid
        if not grid:
            raise ValueError("grid must not be empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("grid must be strictly increasing")
        return grid

    @field_validator("c", "x")
    @classmethod
    def nonnegative(cls, grid: Optional[List[float]]) -> Optional[List[float]]:
        if grid is not None and grid[0] < 0:
            raise ValueError("grid values must be nonnegative")
        return grid

    @field_validator("alpha")
    @classmethod
    def probabilities(cls, grid: Optional[List[float]]) -> Optional[List[float]]:
        if grid is not None and (grid[0] < 0 or grid[-1] > 1):
            raise ValueError("risk levels must lie in [0, 1]")
        return grid


class RunConfig(BaseModel):
    """Everything one CLI command needs."""
    model_config = ConfigDict(extra="forbid")

    market: MarketParams
    payoff: Payoff
    quadrature: QuadratureSection = Field(default_factory=QuadratureSection)
    solver: SolverSection = Field(default_factory=SolverSection)
    monte_carlo: MonteCarloSection = Field(default_factory=MonteCarloSection)
    grids: GridSection = Field(default_factory=GridSection)


def parse_grid(text: str) -> List[float]:
    """'0.1,0.2,0.5' -> [0.1, 0.2, 0.5]; raises InvalidParameter."""
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise InvalidParameter(f"grid must be comma-separated reals, got {text!r}") from e


def _read_toml(path: Optional[str]) -> Dict[str, Any]:
    if path is None:
        return {}
    file = Path(path)
    if not file.is_file():
        raise InvalidParameter(f"config file not found: {path}", {"path": path})
    try:
        with file.open("rb") as handle:
            return tomllib.load(handle)
    except tomllib.TOMLDecodeError as e:
        raise InvalidParameter(f"config file is not valid TOML: {e}", {"path": path}) from e


def load_run_config(path: Optional[str], overrides: Optional[Dict[str, Dict[str, Any]]] = None) -> RunConfig:
    """
    Read ``path`` (TOML), merge per-section ``overrides`` and validate.

    Raises:
        InvalidParameter: missing or malformed file, or a field that fails validation
    """
    raw = _read_toml(path)
    for section, values in (overrides or {}).items():
        values = _drop_unset(values)
        if values:
            raw.setdefault(section, {})
            if not isinstance(raw[section], dict):
                raise InvalidParameter(f"config section [{section}] must be a table")
            raw[section].update(values)
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(part) for part in first.get("loc", ()))
        raise InvalidParameter(
            f"invalid run configuration {field or '(root)'}: {first.get('msg')}",
            {"field": field, "errors": len(e.errors())},
        ) from e
