# ============================================================================
# MODULE CONTEXT - LOGGING
# ============================================================================
# STATUS: Core Infrastructure - used by every package and the CLI
# PURPOSE: JSON-only structured logging to standard error
# EXPORTS: ComponentType, LogLevel, LogContext, ComponentConfig, JSONFormatter,
#          LoggerFactory, configure_logging, log_exceptions
# INTERFACES: Dataclass models, enums, factory, JSON formatter, exception decorator
# DEPENDENCIES: enum, dataclasses, typing, datetime, logging, json, traceback
# SCOPE: Logging for library code and the command-line entry point
# PATTERNS: JSON-only output, component-scoped loggers, exception decorator
# ENTRY_POINTS: LoggerFactory.create_logger(), configure_logging(), @log_exceptions
# ============================================================================

"""
Unified Logger System

Every record is one JSON object per line on standard error. Standard
output belongs to the CLI's CSV tables, so nothing in this module ever
writes there.

Helper modules use ``logging.getLogger(__name__)``. Each package layer
(model, numerics, engine, solver, oracle, CLI) has a component logger from
``LoggerFactory``, so its records carry ``component_type`` /
``component_name`` and any ``LogContext`` correlation fields in
``customDimensions``.

Environment:
    QHEDGE_LOG_LEVEL      default level (falls back to WARNING)
    QHEDGE_DEBUG_LOGGING  "true" forces DEBUG everywhere
"""

from enum import Enum
from typing import Optional, Dict, Any
from datetime import datetime, timezone
from dataclasses import dataclass
import logging
import os
import sys
import json
import traceback
from functools import wraps


# ============================================================================
# COMPONENT TYPES
# ============================================================================

class ComponentType(Enum):
    """
    Component types aligned with the package layers.

    MODEL covers market and payoff records, NUMERICS the Gaussian kit,
    ENGINE the Psi formulas, SOLVER the Phi inversion, ORACLE the Monte
    Carlo and Neyman-Pearson checks, CLI the command surface.
    """
    MODEL = "model"
    NUMERICS = "numerics"
    ENGINE = "engine"
    SOLVER = "solver"
    ORACLE = "oracle"
    CLI = "cli"


# ============================================================================
# LOG LEVELS
# ============================================================================

class LogLevel(Enum):
    """Standard Python log levels as enum for type safety."""
    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"

    def to_python_level(self) -> int:
        """Convert to Python logging level constant."""
        return getattr(logging, self.value)

    @classmethod
    def from_string(cls, level: str) -> 'LogLevel':
        """Create from string, case-insensitive."""
        return cls[level.upper()]


def _env_level() -> LogLevel:
    if os.getenv("QHEDGE_DEBUG_LOGGING", "").lower() == "true":
        return LogLevel.DEBUG
    try:
        return LogLevel.from_string(os.getenv("QHEDGE_LOG_LEVEL", "WARNING"))
    except KeyError:
        return LogLevel.WARNING


# ============================================================================
# LOG CONTEXT - Correlation fields for one run
# ============================================================================

@dataclass
class LogContext:
    """
    Context for log correlation across one CLI run.

    ``run_id`` ties together every record of a single invocation;
    ``command`` and ``payoff`` say what was being computed.
    """
    run_id: Optional[str] = None
    command: Optional[str] = None
    payoff: Optional[str] = None
    seed: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            k: v for k, v in {
                'run_id': self.run_id,
                'command': self.command,
                'payoff': self.payoff,
                'seed': self.seed,
            }.items() if v is not None
        }


# ============================================================================
# COMPONENT CONFIGURATION
# ============================================================================

@dataclass
class ComponentConfig:
    """Per-component logging settings."""
    component_type: ComponentType
    log_level: LogLevel = LogLevel.WARNING


# ============================================================================
# JSON FORMATTER
# ============================================================================

class JSONFormatter(logging.Formatter):
    """One JSON object per record, with custom dimensions and exception info."""

    def format(self, record: logging.LogRecord) -> str:
        log_obj = {
            'timestamp': datetime.now(timezone.utc).isoformat(),
            'level': record.levelname,
            'message': record.getMessage(),
            'logger': record.name,
            'module': record.module,
            'function': record.funcName,
            'line': record.lineno
        }

        if hasattr(record, 'custom_dimensions'):
            log_obj['customDimensions'] = record.custom_dimensions

        if record.exc_info:
            log_obj['exception'] = {
                'type': record.exc_info[0].__name__ if record.exc_info[0] else None,
                'message': str(record.exc_info[1]) if record.exc_info[1] else None,
                'traceback': self.formatException(record.exc_info)
            }

        return json.dumps(log_obj, default=str)


def _stderr_handler(level: int) -> logging.Handler:
    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(level)
    handler.setFormatter(JSONFormatter())
    return handler


def configure_logging(level: Optional[str] = None) -> None:
    """
    Attach the JSON stderr handler to the root logger.

    Called once by entry points. ``level`` overrides the environment.
    """
    resolved = LogLevel.from_string(level) if level else _env_level()
    root = logging.getLogger()
    for existing in list(root.handlers):
        root.removeHandler(existing)
    root.addHandler(_stderr_handler(resolved.to_python_level()))
    root.setLevel(resolved.to_python_level())


# ============================================================================
# LOGGER FACTORY
# ============================================================================

class LoggerFactory:
    """
    Factory for component-specific loggers.

    Example:
        logger = LoggerFactory.create_logger(ComponentType.SOLVER, "QuantileSolver")
        logger.debug("bracket expanded", extra={'custom_dimensions': {'c_hi': 4.0}})
    """

    @classmethod
    def default_config(cls, component_type: ComponentType) -> ComponentConfig:
        level = _env_level()
        return ComponentConfig(
            component_type=component_type,
            log_level=level,
        )

    @classmethod
    def create_logger(
        cls,
        component_type: ComponentType,
        name: str,
        context: Optional[LogContext] = None,
        config: Optional[ComponentConfig] = None
    ) -> logging.Logger:
        """
        Create a logger for a specific component.

        Records propagate to the root logger, so ``configure_logging``
        decides where they go; the logger itself only sets the level and
        injects component and context fields.
        """
        if config is None:
            config = cls.default_config(component_type)

        logger = logging.getLogger(f"{component_type.value}.{name}")
        logger.setLevel(config.log_level.to_python_level())
        logger.propagate = True

        if getattr(logger, '_qhedge_wrapped', False):
            logger._qhedge_context = context
            return logger

        original_log = logger._log
        logger._qhedge_context = context

        def log_with_context(level, msg, args, exc_info=None, extra=None, stack_info=False, stacklevel=1):
            """Inject context as custom dimensions."""
            extra = dict(extra or {})
            custom_dims = {
                'component_type': component_type.value,
                'component_name': name,
            }
            if logger._qhedge_context:
                custom_dims.update(logger._qhedge_context.to_dict())
            if 'custom_dimensions' in extra:
                custom_dims.update(extra['custom_dimensions'])
            extra['custom_dimensions'] = custom_dims
            original_log(level, msg, args, exc_info=exc_info, extra=extra,
                         stack_info=stack_info, stacklevel=stacklevel)

        logger._log = log_with_context
        logger._qhedge_wrapped = True
        return logger


# ============================================================================
# EXCEPTION DECORATOR
# ============================================================================

def log_exceptions(component_type: Optional[ComponentType] = None,
                   component_name: Optional[str] = None,
                   logger: Optional[logging.Logger] = None):
    """
    Log any exception escaping the wrapped function, then re-raise it.

    Errors from this package contribute their ``to_dict()`` payload.
    """
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            if logger:
                log = logger
            else:
                log = LoggerFactory.create_logger(
                    component_type or ComponentType.ENGINE,
                    component_name or func.__module__ or "unknown"
                )

            try:
                return func(*args, **kwargs)
            except Exception as e:
                dims = {
                    'function_name': func.__name__,
                    'exception_type': type(e).__name__,
                    'exception_message': str(e),
                    'traceback': traceback.format_exc(),
                }
                if hasattr(e, 'to_dict'):
                    dims['error'] = e.to_dict()
                log.error(f"Exception in {func.__name__}", extra={'custom_dimensions': dims})
                raise
        return wrapper
    return decorator
