"""The growth law G and the blow-up time lower bound

    t* >= int_{Phi(0)}^infty dtau / (A tau^f(eta,r) + B tau^f(eta,1) + C tau^eta + D).

The improper integral is split at a crossover point tau_c.  The finite part is
integrated directly on [Phi(0), 1] and in log(tau) on [1, tau_c]; the tail is
mapped onto (0, 1/tau_c] with sigma = 1/tau, where the integrand behaves like
sigma^(g_max - 2) and is handed to QUADPACK's algebraic-weight rule.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .constants import BoundConstants
from .errors import DivergentIntegralError, InvalidToleranceError, KSError, OutOfDomainError
from .exponents import ExponentConfig

DEFAULT_TOL = 1e-10
_REL_TARGET = 1e-11
_LOG_HUGE = 700.0


@dataclass(frozen=True)
class BoundReport:
    phi0: float
    t_lower: float
    method: str
    constants: BoundConstants
    exponents: ExponentConfig
    quadrature_error_estimate: float
    conditional_on: tuple[str, ...] = ()


def _terms(bc: BoundConstants, cfg: ExponentConfig) -> list[tuple[float, float]]:
    return [(bc.A, cfg.f_r), (bc.B, cfg.f_1), (bc.C, cfg.eta), (bc.D, 0.0)]


def _power_sum(terms, x: float) -> float:
    """sum c * x^e, saturating to inf instead of raising on overflow."""
    try:
        return sum(float(c) * float(x) ** e for c, e in terms)
    except OverflowError:
        return math.inf


def g_of_phi(phi: float, bc: BoundConstants, cfg: ExponentConfig) -> float:
    if phi < 0:
        raise KSError(f"Phi must be >= 0, got {phi}")
    return _power_sum(_terms(bc, cfg), phi)


def _crossover(terms: list[tuple[float, float]], g_max: float, c_max: float) -> float:
    """Point beyond which the top-exponent term dominates every other term."""
    tau_c = 1.0
    for coef, expo in terms:
        if coef > 0 and expo < g_max:
            log_tau = (math.log(coef) - math.log(c_max)) / (g_max - expo)
            tau_c = max(tau_c, math.exp(min(log_tau, _LOG_HUGE)))
    return tau_c


def _quad(func, lo, hi, epsabs, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, err = integrate.quad(func, lo, hi, epsabs=epsabs, epsrel=_REL_TARGET,
                                    limit=500, **kw)
    return value, err


def lower_bound_integral(phi0: float, bc: BoundConstants, cfg: ExponentConfig,
                         tol: float = DEFAULT_TOL) -> BoundReport:
    if not tol > 0:
        raise InvalidToleranceError(f"tolerance must be > 0, got {tol}")
    if not phi0 >= 0 or not math.isfinite(phi0):
        raise KSError(f"Phi(0) must be finite and >= 0, got {phi0}")
    terms = [(c, e) for c, e in _terms(bc, cfg) if c > 0]
    growing = [(c, e) for c, e in terms if e > 1.0]
    if not growing:
        raise DivergentIntegralError("no term of G grows faster than tau; the integral diverges")
    if phi0 == 0 and bc.D <= 0:
        raise DivergentIntegralError("G(0) = 0, the integrand is not integrable at Phi(0) = 0")
    g_max = max(e for _, e in growing)
    c_max = sum(c for c, e in growing if e == g_max)
    tau_c = max(_crossover(terms, g_max, c_max), phi0)

    def g(tau):
        return _power_sum(terms, tau)

    # Absolute target per piece; tightened relative to a rough first estimate so
    # tiny bounds (~1e-10) are still resolved to many digits.
    rough = (tau_c - phi0) / g(max(tau_c, 1e-300)) + tau_c ** (1.0 - g_max) / (c_max * (g_max - 1.0))
    epsabs = min(tol, _REL_TARGET * abs(rough)) / 3.0

    total, err = 0.0, 0.0
    if phi0 < 1.0:
        v, e = _quad(lambda t: 1.0 / g(t), phi0, min(1.0, tau_c), epsabs)
        total, err = total + v, err + e
    lo = max(phi0, 1.0)
    if tau_c > lo:
        v, e = _quad(lambda s: math.exp(s) / g(math.exp(s)), math.log(lo), math.log(tau_c), epsabs)
        total, err = total + v, err + e

    # Tail: sigma = 1/tau, integrand sigma^(g_max-2) / h(sigma) with
    # h(sigma) = sum c sigma^(g_max - e) smooth and bounded away from 0.
    flipped = [(c, g_max - e) for c, e in terms]

    def h(s):
        return _power_sum(flipped, s)

    v, e = _quad(lambda s: 1.0 / h(s), 0.0, 1.0 / tau_c, epsabs, weight="alg",
                 wvar=(g_max - 2.0, 0.0))
    total, err = total + v, err + e
    return BoundReport(phi0=phi0, t_lower=total, method="quadrature", constants=bc,
                       exponents=cfg, quadrature_error_estimate=err,
                       conditional_on=tuple(bc.conditional_on))


def corollary_bound(phi0: float, bc: BoundConstants, cfg: ExponentConfig) -> BoundReport:
    """Closed-form under-estimate of the integral valid for 0 < Phi(0) < 1.

    The branch variable is r: for r >= 1 the f(eta,r) exponent dominates,
    otherwise f(eta,1) does, and its prefactor 1/(f-1) is used.
    """
    if not 0.0 < phi0 < 1.0:
        raise OutOfDomainError(f"closed form requires 0 < Phi(0) < 1, got {phi0}")
    denom = _power_sum([(bc.A, cfg.f_r - 1.0), (bc.B, cfg.f_1 - 1.0), (bc.C, cfg.eta - 1.0)],
                       phi0) + bc.D
    if cfg.r >= 1.0:
        lead, method = cfg.f_r, "corollary-s>=1"
    else:
        lead, method = cfg.f_1, "corollary-s<1"
    if not lead > 1.0:
        raise DivergentIntegralError(f"leading exponent {lead} must be > 1")
    t = phi0 / ((lead - 1.0) * denom)
    return BoundReport(phi0=phi0, t_lower=t, method=method, constants=bc, exponents=cfg,
                       quadrature_error_estimate=0.0,
                       conditional_on=tuple(bc.conditional_on))


def single_term_integral(phi0: float, coef: float, expo: float) -> float:
    """Closed form of int_{phi0}^inf dtau / (coef tau^expo) for expo > 1."""
    return phi0 ** (1.0 - expo) / (coef * (expo - 1.0))


def bound_curve(phi0_values, bc: BoundConstants, cfg: ExponentConfig,
                tol: float = DEFAULT_TOL) -> np.ndarray:
    return np.array([lower_bound_integral(float(x), bc, cfg, tol).t_lower for x in phi0_values])
