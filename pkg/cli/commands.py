# ============================================================================
# MODULE CONTEXT - CLI COMMANDS
# ============================================================================
# STATUS: Entry Point - command-line surface
# PURPOSE: price / psi / phi1 / phi2 / verify subcommands writing CSV tables
# EXPORTS: get_cli_commands, BaseCommand, build_parser, run
# DEPENDENCIES: argparse, pandas, util_logger, every computational package
# PATTERNS: Command registry (get_cli_commands), base command with shared
#           config loading, logging and exit-code mapping
# ENTRY_POINTS: python -m cli price --config configs/baseline.toml
# ============================================================================

"""
Command-line surface.

    python -m cli price  --config configs/baseline.toml --payoff spread --strike 5
    python -m cli psi    --config configs/baseline.toml --c-grid 0.001,0.01,0.1
    python -m cli phi1   --config configs/baseline.toml --x-grid 5,10,20
    python -m cli phi2   --config configs/baseline.toml --alpha-grid 0,0.05,0.1
    python -m cli verify --config configs/degenerate.toml

CSV goes to standard output (or ``--out``); JSON logs go to standard
error. Exit codes: 0 success, 1 bad input, 2 numerical failure,
3 verification failure.
"""

import argparse
import time
import uuid
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd
from pydantic import ValidationError

from config import get_app_config
from exceptions import (
    EXIT_BAD_INPUT,
    EXIT_OK,
    EXIT_VERIFICATION_FAILURE,
    InvalidParameter,
    QuantileHedgingError,
)
from market import MarketModel, new_market
from mc_oracle import mc_price
from payoffs import PayoffKind
from psi_engine import PsiMethod, psi2, psi_curve
from quantile_solver import QuantileSolver
from util_logger import ComponentType, LogContext, LoggerFactory, configure_logging, log_exceptions
from .config import RunConfig, load_run_config, parse_grid
from .output import write_table
from .verify import VerificationSuite

PRICE_COLUMNS = "payoff, strike, price, price_error, method, mc_price, mc_std_error, mc_n, seed"
PSI_COLUMNS = "c, psi1, psi1_error, psi2, psi2_error, method"
PHI1_COLUMNS = "x, phi1, error, c_star, branch, modified_claim_price, method"
PHI2_COLUMNS = "alpha, phi2, error, c_star, branch, modified_claim_price, cost_ratio, method"
VERIFY_COLUMNS = "check, status, value, error, detail"


class _ArgumentParser(argparse.ArgumentParser):
    """argparse that reports usage errors as bad input instead of exiting 2."""

    def error(self, message: str):
        raise InvalidParameter(f"{self.prog}: {message}")


# ============================================================================
# COMMAND REGISTRY FUNCTION
# ============================================================================

def get_cli_commands() -> List[Dict[str, Any]]:
    """
    Subcommand configurations for the argument parser.

    Returns:
        List of dicts with keys:
        - name: subcommand name
        - help: one-line description including the CSV columns
        - handler: BaseCommand instance
    """
    return [
        {
            'name': 'price',
            'help': f"arbitrage price p(H) with a Monte Carlo cross-check; columns: {PRICE_COLUMNS}",
            'handler': PriceCommand()
        },
        {
            'name': 'psi',
            'help': f"Psi1 and Psi2 on a grid of levels c; columns: {PSI_COLUMNS}",
            'handler': PsiCommand()
        },
        {
            'name': 'phi1',
            'help': f"maximal success probability for each budget x; columns: {PHI1_COLUMNS}",
            'handler': Phi1Command()
        },
        {
            'name': 'phi2',
            'help': f"minimal hedging cost for each risk level alpha; columns: {PHI2_COLUMNS}",
            'handler': Phi2Command()
        },
        {
            'name': 'verify',
            'help': f"Monte Carlo and invariant checks, exit 3 on failure; columns: {VERIFY_COLUMNS}",
            'handler': VerifyCommand()
        }
    ]


# ============================================================================
# BASE COMMAND CLASS
# ============================================================================

class BaseCommand:
    """
    Shared behaviour of every subcommand: load the run configuration,
    build the market, time the command, write the table and map errors to
    exit codes.
    """

    name: str = "command"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        """Command-specific flags; the shared ones are added by ``build_parser``."""

    def grid_overrides(self, args: argparse.Namespace) -> Dict[str, Any]:
        return {}

    def execute(self, config: RunConfig, model: MarketModel, args: argparse.Namespace) -> pd.DataFrame:
        raise NotImplementedError

    def exit_code(self) -> int:
        return EXIT_OK

    def _overrides(self, args: argparse.Namespace) -> Dict[str, Dict[str, Any]]:
        return {
            "payoff": {"kind": args.payoff, "strike": args.strike},
            "quadrature": {"abs_tol": args.abs_tol, "rel_tol": args.rel_tol},
            "monte_carlo": {"n": args.mc_n, "seed": args.seed},
            "grids": self.grid_overrides(args),
        }

    def handle(self, args: argparse.Namespace) -> int:
        configure_logging("INFO" if args.verbose else None)
        context = LogContext(run_id=uuid.uuid4().hex[:12], command=self.name,
                             payoff=args.payoff, seed=args.seed)
        logger = LoggerFactory.create_logger(ComponentType.CLI, self.name, context)
        started = time.perf_counter()
        try:
            config = load_run_config(args.config, self._overrides(args))
            model = new_market(config.market)
            frame = self.execute(config, model, args)
            write_table(frame, args.out)
        except QuantileHedgingError as e:
            logger.error(f"{self.name} failed", extra={'custom_dimensions': e.to_dict()})
            return e.exit_code
        except ValidationError as e:
            logger.error(f"{self.name} rejected its input", extra={'custom_dimensions': {'error': str(e)}})
            return EXIT_BAD_INPUT
        except OSError as e:
            logger.error(f"{self.name} could not write its output", extra={'custom_dimensions': {'error': str(e)}})
            return EXIT_BAD_INPUT
        code = self.exit_code()
        logger.info(
            f"{self.name} finished",
            extra={'custom_dimensions': {'seconds': round(time.perf_counter() - started, 3),
                                         'rows': len(frame), 'exit_code': code}},
        )
        return code


# ============================================================================
# COMMANDS
# ============================================================================

class PriceCommand(BaseCommand):
    name = "price"

    def execute(self, config: RunConfig, model: MarketModel, args: argparse.Namespace) -> pd.DataFrame:
        payoff = config.payoff
        value = psi2(model, payoff, 0.0, config.quadrature.to_spec())
        estimate = mc_price(model, payoff, config.monte_carlo.n, config.monte_carlo.seed)
        return pd.DataFrame({
            "payoff": [payoff.kind.value],
            "strike": [payoff.strike],
            "price": [value.value],
            "price_error": [value.est_error],
            "method": [value.method.value],
            "mc_price": [estimate.mean],
            "mc_std_error": [estimate.std_error],
            "mc_n": [estimate.n],
            "seed": [estimate.seed],
        })


class PsiCommand(BaseCommand):
    name = "psi"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--c-grid", help="comma-separated increasing levels c >= 0")

    def grid_overrides(self, args: argparse.Namespace) -> Dict[str, Any]:
        return {"c": parse_grid(args.c_grid) if args.c_grid else None}

    def execute(self, config: RunConfig, model: MarketModel, args: argparse.Namespace) -> pd.DataFrame:
        if config.grids.c is None:
            raise InvalidParameter("psi needs --c-grid or [grids] c")
        return psi_curve(model, config.payoff, config.grids.c, config.quadrature.to_spec()).to_frame()


class Phi1Command(BaseCommand):
    name = "phi1"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--x-grid", help="comma-separated increasing budgets x >= 0")

    def grid_overrides(self, args: argparse.Namespace) -> Dict[str, Any]:
        return {"x": parse_grid(args.x_grid) if args.x_grid else None}

    def execute(self, config: RunConfig, model: MarketModel, args: argparse.Namespace) -> pd.DataFrame:
        if config.grids.x is None:
            raise InvalidParameter("phi1 needs --x-grid or [grids] x")
        solver = QuantileSolver(model, config.payoff, config.quadrature.to_spec(),
                                config.solver.to_settings())
        results = [solver.phi1(x) for x in config.grids.x]
        return pd.DataFrame({
            "x": config.grids.x,
            "phi1": [r.value for r in results],
            "error": [r.error for r in results],
            "c_star": [r.c_star for r in results],
            "branch": [r.branch.value for r in results],
            "modified_claim_price": [r.modified_claim_price for r in results],
            "method": [PsiMethod.QUADRATURE.value] * len(results),
        })


class Phi2Command(BaseCommand):
    name = "phi2"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--alpha-grid", help="comma-separated increasing risk levels in [0, 1]")

    def grid_overrides(self, args: argparse.Namespace) -> Dict[str, Any]:
        return {"alpha": parse_grid(args.alpha_grid) if args.alpha_grid else None}

    def execute(self, config: RunConfig, model: MarketModel, args: argparse.Namespace) -> pd.DataFrame:
        if config.grids.alpha is None:
            raise InvalidParameter("phi2 needs --alpha-grid or [grids] alpha")
        solver = QuantileSolver(model, config.payoff, config.quadrature.to_spec(),
                                config.solver.to_settings())
        results = [solver.phi2(alpha) for alpha in config.grids.alpha]
        return pd.DataFrame({
            "alpha": config.grids.alpha,
            "phi2": [r.value for r in results],
            "error": [r.error for r in results],
            "c_star": [r.c_star for r in results],
            "branch": [r.branch.value for r in results],
            "modified_claim_price": [r.modified_claim_price for r in results],
            "cost_ratio": [r.value / solver.price for r in results],
            "method": [PsiMethod.QUADRATURE.value] * len(results),
        })


class VerifyCommand(BaseCommand):
    name = "verify"

    def __init__(self):
        self._failed = False

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--sigmas", type=float, default=None,
                            help="standard-error multiple for Monte Carlo checks")

    def execute(self, config: RunConfig, model: MarketModel, args: argparse.Namespace) -> pd.DataFrame:
        sigmas = args.sigmas if args.sigmas is not None else get_app_config().verify_sigmas
        if not sigmas > 0:
            raise InvalidParameter(f"--sigmas must be positive, got {sigmas}")
        suite = VerificationSuite(
            model, config.payoff, config.quadrature.to_spec(), config.solver.to_settings(),
            n=config.monte_carlo.n, seed=config.monte_carlo.seed, sigmas=sigmas,
        ).run()
        self._failed = suite.failed
        return suite.to_frame()

    def exit_code(self) -> int:
        return EXIT_VERIFICATION_FAILURE if self._failed else EXIT_OK


# ============================================================================
# PARSER AND ENTRY POINT
# ============================================================================

def _shared_flags() -> argparse.ArgumentParser:
    shared = _ArgumentParser(add_help=False)
    shared.add_argument("--config", help="TOML run file")
    shared.add_argument("--payoff", choices=[k.value for k in PayoffKind], help="claim type")
    shared.add_argument("--strike", type=float, help="strike K > 0")
    shared.add_argument("--out", help="CSV output path (default: standard output)")
    shared.add_argument("--seed", type=int, help="Monte Carlo generator key")
    shared.add_argument("--mc-n", type=int, help="Monte Carlo sample count")
    shared.add_argument("--rel-tol", type=float, help="quadrature relative tolerance")
    shared.add_argument("--abs-tol", type=float, help="quadrature absolute tolerance")
    shared.add_argument("--verbose", action="store_true", help="log at INFO level")
    return shared


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="qhedge",
        description="Quantile hedging of two-asset claims in a correlated Black-Scholes market.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)
    shared = _shared_flags()
    for command in get_cli_commands():
        sub = subparsers.add_parser(command['name'], help=command['help'],
                                    description=command['help'], parents=[shared])
        command['handler'].add_arguments(sub)
        sub.set_defaults(handler=command['handler'])
    return parser


@log_exceptions(ComponentType.CLI, "entry")
def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv`` and run one subcommand; returns the process exit code."""
    try:
        args = build_parser().parse_args(argv)
    except InvalidParameter as e:
        configure_logging()
        LoggerFactory.create_logger(ComponentType.CLI, "parser").error(
            "invalid command line", extra={'custom_dimensions': e.to_dict()}
        )
        return e.exit_code
    return args.handler.handle(args)
