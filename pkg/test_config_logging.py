"""
Environment configuration, structured logging and the error taxonomy.
"""

import json
import logging
import sys

import pytest
from pydantic import ValidationError

from config import AppConfig, get_app_config, validate_configuration
from exceptions import (
    EXIT_BAD_INPUT,
    EXIT_NUMERICAL_FAILURE,
    DegenerateMeasure,
    InvalidParameter,
    OutOfRange,
    ToleranceNotMet,
)
from gaussian import QuadratureSpec
from quantile_solver import SolverSettings
from util_logger import (
    ComponentType,
    JSONFormatter,
    LogContext,
    LoggerFactory,
    LogLevel,
    configure_logging,
    log_exceptions,
)


# ----------------------------------------------------------------------
# Configuration
# ----------------------------------------------------------------------

def test_defaults():
    config = get_app_config()
    assert config.quad_abs_tol == 1e-9 and config.quad_rel_tol == 1e-10
    assert config.solver_risk_tol == 1e-8 and config.solver_bracket_cap == 1e12
    assert config.mc_seed == 20240601
    assert config.effective_log_level == "WARNING"
    assert get_app_config() is config


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("QHEDGE_QUAD_ABS_TOL", "1e-7")
    monkeypatch.setenv("QHEDGE_SOLVER_MAX_ITERATIONS", "50")
    monkeypatch.setenv("QHEDGE_DEBUG_LOGGING", "true")
    get_app_config.cache_clear()
    config = get_app_config()
    assert config.quad_abs_tol == 1e-7
    assert config.effective_log_level == "DEBUG"
    assert QuadratureSpec().abs_tol == 1e-7
    assert SolverSettings().max_iterations == 50


def test_bad_environment_is_rejected(monkeypatch):
    monkeypatch.setenv("QHEDGE_LOG_LEVEL", "chatty")
    with pytest.raises(ValidationError):
        AppConfig()
    monkeypatch.setenv("QHEDGE_LOG_LEVEL", "info")
    monkeypatch.setenv("QHEDGE_QUAD_TRUNC_SIGMAS", "3")
    with pytest.raises(ValidationError):
        AppConfig()


def test_validate_configuration_logs(caplog):
    with caplog.at_level(logging.INFO, logger="config"):
        assert validate_configuration()
    assert any("Monte Carlo" in record.getMessage() for record in caplog.records)


# ----------------------------------------------------------------------
# Logging
# ----------------------------------------------------------------------

def _record(message: str, **extra) -> logging.LogRecord:
    record = logging.LogRecord("solver.test", logging.WARNING, __file__, 10, message, None, None)
    for key, value in extra.items():
        setattr(record, key, value)
    return record


def test_json_formatter_emits_one_object():
    line = JSONFormatter().format(_record("bracket found", custom_dimensions={"c_hi": 4.0}))
    payload = json.loads(line)
    assert payload["level"] == "WARNING"
    assert payload["message"] == "bracket found"
    assert payload["customDimensions"] == {"c_hi": 4.0}
    assert "\n" not in line


def test_json_formatter_includes_exceptions():
    try:
        raise OutOfRange("alpha too large")
    except OutOfRange:
        record = _record("failed", exc_info=sys.exc_info())
    payload = json.loads(JSONFormatter().format(record))
    assert payload["exception"]["type"] == "OutOfRange"
    assert "alpha too large" in payload["exception"]["message"]


def test_component_logger_adds_context(capsys):
    configure_logging("INFO")
    context = LogContext(run_id="abc123", command="phi2", payoff="digital")
    logger = LoggerFactory.create_logger(ComponentType.SOLVER, "ContextCheck", context)
    logger.warning("level found", extra={'custom_dimensions': {'c': 0.5}})
    payload = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    dims = payload["customDimensions"]
    assert dims["component_type"] == "solver" and dims["component_name"] == "ContextCheck"
    assert dims["run_id"] == "abc123" and dims["c"] == 0.5
    assert "seed" not in dims


def test_every_component_type_names_a_package_logger():
    import cli.verify
    import gaussian.quadrature
    import market.service
    import mc_oracle.neyman_pearson
    import psi_engine.service
    import quantile_solver.service

    modules = [market.service, gaussian.quadrature, psi_engine.service,
               quantile_solver.service, mc_oracle.neyman_pearson, cli.verify]
    prefixes = {module.logger.name.split(".")[0] for module in modules}
    assert prefixes == {component.value for component in ComponentType}


def test_logging_never_touches_stdout(capsys):
    configure_logging("INFO")
    LoggerFactory.create_logger(ComponentType.CLI, "StdoutCheck").warning("hello")
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "hello" in captured.err


def test_log_level_parsing():
    assert LogLevel.from_string("debug") is LogLevel.DEBUG
    assert LogLevel.WARNING.to_python_level() == logging.WARNING


def test_log_exceptions_reraises_and_records(capsys):
    configure_logging("ERROR")

    @log_exceptions(ComponentType.ENGINE, "failing_step")
    def explode():
        raise DegenerateMeasure("no interior level", {"payoff": "digital"})

    with pytest.raises(DegenerateMeasure):
        explode()
    payload = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert payload["customDimensions"]["error"]["error_type"] == "DegenerateMeasure"
    assert payload["customDimensions"]["function_name"] == "explode"


# ----------------------------------------------------------------------
# Errors
# ----------------------------------------------------------------------

def test_error_payload_and_exit_codes():
    bad = InvalidParameter("rho out of range", {"field": "rho"})
    assert bad.to_dict() == {"error": "rho out of range", "error_type": "InvalidParameter",
                             "details": {"field": "rho"}}
    assert bad.exit_code == EXIT_BAD_INPUT
    assert isinstance(bad, ValueError)
    assert DegenerateMeasure("flat").exit_code == EXIT_NUMERICAL_FAILURE


def test_tolerance_error_carries_estimate():
    error = ToleranceNotMet("quadrature", estimate=0.25, abs_error=1e-3)
    assert error.estimate == 0.25 and error.abs_error == 1e-3
    assert error.to_dict()["details"]["estimate"] == 0.25
