# ============================================================================
# MODULE CONTEXT - GAUSSIAN-WEIGHTED QUADRATURE
# ============================================================================
# STATUS: Foundation - quadrature engine behind every Psi formula
# PURPOSE: Adaptive integration of f(x) * density(x) over a truncated window
# EXPORTS: integrate_gauss_weighted, integrate_nested
# DEPENDENCIES: numpy, scipy.integrate
# ============================================================================

"""
Gaussian-weighted quadrature.

Integrals are taken in the standardized variable z = (x - m) / sd over
[-trunc_sigmas, trunc_sigmas] intersected with [lower, upper], using
QUADPACK's adaptive Gauss-Kronrod rule (``scipy.integrate.quad``).
Jump points of piecewise integrands are passed as ``breakpoints`` so
each piece is smooth.

Neither function raises on a missed tolerance unless ``strict=True``;
the result carries ``converged=False`` and the callers decide.
"""

import math
from typing import Callable, Iterable, Optional, Union

from scipy import integrate

from exceptions import ToleranceNotMet
from util_logger import ComponentType, LoggerFactory
from .models import GaussianVec, QuadratureResult, QuadratureSpec

logger = LoggerFactory.create_logger(ComponentType.NUMERICS, "quadrature")

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# QUADPACK may report roundoff once the estimate sits within a few
# hundred ulps of the target; such results are accepted up to this factor.
_ROUNDOFF_SLACK = 1e3

InnerValue = Union[float, QuadratureResult]


def _check_strict(result: QuadratureResult, strict: bool, label: str) -> QuadratureResult:
    if not result.converged:
        logger.warning(
            f"{label}: tolerance not met",
            extra={'custom_dimensions': {'value': result.value, 'abs_error': result.abs_error,
                                         'message': result.message}},
        )
        if strict:
            raise ToleranceNotMet(f"{label}: tolerance not met", result.value, result.abs_error)
    return result


def integrate_gauss_weighted(
    f: Callable[[float], float],
    weight: GaussianVec,
    spec: Optional[QuadratureSpec] = None,
    lower: float = -math.inf,
    upper: float = math.inf,
    breakpoints: Iterable[float] = (),
    strict: bool = False,
) -> QuadratureResult:
    """
    Integrate f(x) * density(x) for the univariate law ``weight``.

    Args:
        f: integrand, evaluated at points inside the window
        weight: univariate normal law
        spec: tolerances and window (application defaults when omitted)
        lower, upper: optional integration limits in x
        breakpoints: x positions where f jumps or kinks
        strict: raise ToleranceNotMet instead of flagging

    Returns:
        QuadratureResult with value, error estimate and convergence flag
    """
    spec = spec or QuadratureSpec()
    m = float(weight.mean[0])
    sd = weight.sd

    if sd == 0.0:
        value = float(f(m)) if lower <= m <= upper else 0.0
        return QuadratureResult(value=value, abs_error=0.0, converged=True, n_evaluations=1)

    z_lo = max(-spec.trunc_sigmas, (lower - m) / sd)
    z_hi = min(spec.trunc_sigmas, (upper - m) / sd)
    if not z_lo < z_hi:
        return QuadratureResult(value=0.0, abs_error=0.0, converged=True)

    def integrand(z: float) -> float:
        return float(f(m + sd * z)) * _INV_SQRT_2PI * math.exp(-0.5 * z * z)

    points = sorted({(b - m) / sd for b in breakpoints if math.isfinite(b)})
    points = [p for p in points if z_lo < p < z_hi]

    out = integrate.quad(
        integrand, z_lo, z_hi,
        epsabs=spec.abs_tol, epsrel=spec.rel_tol,
        limit=spec.max_subdivisions,
        points=points or None,
        full_output=1,
    )
    value, abs_error, info = float(out[0]), float(out[1]), out[2]
    message = out[3] if len(out) > 3 else None
    target = spec.target(value)
    converged = (
        message is None
        or abs_error <= target
        or ("roundoff" in str(message) and abs_error <= _ROUNDOFF_SLACK * target)
    )
    result = QuadratureResult(
        value=value,
        abs_error=abs_error,
        converged=converged,
        n_evaluations=int(info.get("neval", 0)),
        message=message,
    )
    return _check_strict(result, strict, "integrate_gauss_weighted")


def integrate_nested(
    outer_weight: GaussianVec,
    inner: Callable[[float], InnerValue],
    spec: Optional[QuadratureSpec] = None,
    lower: float = -math.inf,
    upper: float = math.inf,
    breakpoints: Iterable[float] = (),
    strict: bool = False,
) -> QuadratureResult:
    """
    Outer Gaussian quadrature of ``inner(x)``.

    ``inner`` may return a plain float (closed-form conditional value) or a
    QuadratureResult; the reported error adds the worst inner error to the
    outer one, since the outer weights integrate to at most one.
    """
    spec = spec or QuadratureSpec()
    worst_inner = 0.0
    inner_converged = True

    def unwrap(x: float) -> float:
        nonlocal worst_inner, inner_converged
        value = inner(x)
        if isinstance(value, QuadratureResult):
            worst_inner = max(worst_inner, value.abs_error)
            inner_converged = inner_converged and value.converged
            return value.value
        return float(value)

    outer = integrate_gauss_weighted(unwrap, outer_weight, spec, lower, upper, breakpoints)
    result = QuadratureResult(
        value=outer.value,
        abs_error=outer.abs_error + worst_inner,
        converged=outer.converged and inner_converged,
        n_evaluations=outer.n_evaluations,
        message=outer.message,
    )
    return _check_strict(result, strict, "integrate_nested")
