"""Analytic fluxes, regime-limited powers, EMP formulas and optimal coherence.

Scaled energies are ``x = omega_c/T_c`` and ``y = omega_h/T_h``; the engine
runs when ``x > y``. Every flux vanishes on the diagonal ``x == y`` and is
positive in the engine regime.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .exceptions import DomainError
from .params import EngineParams

__all__ = [
    "FluxKind",
    "TaylorCoefficients",
    "flux",
    "power_low_t",
    "power_strong_ht",
    "emp_low_t",
    "optimal_xy_low_t",
    "emp_high_t_symmetric",
    "emp_fixed_wh",
    "taylor_one_parameter",
    "optimal_p",
    "optimal_p_high_t",
    "optimal_p_low_t",
    "clamp_optimal_p",
    "emp_near_equilibrium_coefficient",
]


class FluxKind(str, enum.Enum):
    GENERAL = "general"
    HIGH_T = "high_t"
    STRONG_COUPLING_HIGH_T = "strong_coupling_high_t"
    LOW_T = "low_t"


def _check_denominator(value, what, x, y):
    if value == 0 or not math.isfinite(value):
        raise DomainError(f"{what} denominator vanishes at x={x!r}, y={y!r}")


def _flux_general(x, y, params):
    # exponential-form denominators A_exp + B_exp
    q = 1.0 + params.p
    gc, gh, lam2 = params.gamma_c, params.gamma_h, params.lam**2
    ex, ey = math.exp(x), math.exp(y)
    em1x, em1y = math.expm1(x), math.expm1(y)
    a_exp = ey * (ex * ey + 2 * ex + ey) * (ex * em1y * gc + q * ey * em1x * gh) * q * gc * gh
    b_exp = 8 * lam2 * em1x * em1y * (em1y * ((ex + 2) * ey + ex) * gc + q * ey * em1x * (ey + 3) * gh)
    denom = a_exp + b_exp
    num = 8 * gc * gh * lam2 * q * ey * em1y * (ex - ey) * em1x
    if num == 0.0:
        return 0.0
    _check_denominator(denom, "general flux", x, y)
    return num / denom


def _flux_high_t(x, y, params):
    q = 1.0 + params.p
    gc, gh, lam2 = params.gamma_c, params.gamma_h, params.lam**2
    num = q * x * y * gc * gh * (x - y) * lam2
    if num == 0.0:
        return 0.0
    denom = 2 * (y * gc + q * x * gh) * (q * gc * gh + 2 * lam2 * x * y)
    _check_denominator(denom, "high-temperature flux", x, y)
    return num / denom


def _flux_strong_ht(x, y, params):
    # lam -> infinity limit of the high-temperature flux; carries no lam factor
    q = 1.0 + params.p
    gc, gh = params.gamma_c, params.gamma_h
    num = (x - y) * q * gh * gc
    if num == 0.0:
        return 0.0
    denom = 4 * y * gc + 4 * x * gh * q
    _check_denominator(denom, "strong-coupling flux", x, y)
    return num / denom


def _flux_low_t(x, y, params):
    # e^-y - e^-x, written to keep precision near the diagonal
    return -math.exp(-y) * math.expm1(y - x)


_FLUXES = {
    FluxKind.GENERAL: _flux_general,
    FluxKind.HIGH_T: _flux_high_t,
    FluxKind.STRONG_COUPLING_HIGH_T: _flux_strong_ht,
    FluxKind.LOW_T: _flux_low_t,
}


def flux(kind: FluxKind | str, x: float, y: float, params: EngineParams | None = None) -> float:
    """Matter (photon) flux I(x, y) of the given regime.

    ``params`` supplies the rates, coupling and ``p``; the low-temperature
    flux ignores it.
    """
    kind = FluxKind(kind)
    if kind is not FluxKind.LOW_T:
        if params is None:
            raise TypeError(f"{kind.value} flux needs params")
        if not (x > 0 and y > 0):
            raise DomainError(f"scaled energies must be positive, got x={x!r}, y={y!r}")
    return _FLUXES[kind](x, y, params)


def power_low_t(x: float, y: float, eta_c: float, t_h: float = 1.0) -> float:
    """Low-temperature power T_h [y - x(1-eta_c)] (e^-y - e^-x), prefactor set to 1."""
    return t_h * (y - x * (1.0 - eta_c)) * _flux_low_t(x, y, None)


def optimal_xy_low_t(eta_c: float) -> tuple[float, float]:
    """Exact maximiser (x, y) of :func:`power_low_t`."""
    _check_eta(eta_c)
    log_a = math.log1p(-eta_c)
    return (eta_c - log_a) / eta_c, (eta_c - (1.0 - eta_c) * log_a) / eta_c


def power_strong_ht(omega_c: float, omega_h: float, params: EngineParams) -> float:
    """Power in the strong-coupling, high-temperature limit.

    The Carnot efficiency, rates and ``p`` come from ``params``; the two
    frequencies are passed separately so they can be optimised.
    """
    if not (omega_c > 0 and omega_h > 0):
        raise DomainError("frequencies must be positive")
    a = 1.0 - params.carnot
    q = 1.0 + params.p
    gc, gh = params.gamma_c, params.gamma_h
    denom = 4 * a * gc * omega_h + 4 * q * gh * omega_c
    if denom == 0:
        raise DomainError("strong-coupling power denominator vanishes")
    return (omega_h - omega_c) * (omega_c - a * omega_h) * q * gh * gc / denom


def _check_eta(eta_c):
    if not 0.0 < eta_c < 1.0:
        raise DomainError(f"Carnot efficiency must lie in (0, 1), got {eta_c!r}")


def emp_low_t(eta_c: float) -> float:
    """Efficiency at maximum power of the low-temperature engine."""
    _check_eta(eta_c)
    return eta_c**2 / (eta_c - (1.0 - eta_c) * math.log1p(-eta_c))


def emp_high_t_symmetric(eta_c: float, p: float) -> float:
    """Second-order EMP of the high-temperature engine with equal rates."""
    _check_eta(eta_c)
    return eta_c / 2 + eta_c**2 * (1 + p) / (4 * (2 + p))


def emp_fixed_wh(eta_c: float, params: EngineParams) -> float:
    """EMP of the strong-coupling engine optimised over omega_c at fixed omega_h.

    Evaluated as ``eta X / (X + sqrt(Y))``, which equals the usual
    ``(X - sqrt(Y)) / ((1+p) gamma_h)`` but does not cancel for small eta.
    """
    _check_eta(eta_c)
    q = 1.0 + params.p
    if q == 0.0:
        raise DomainError("EMP at fixed omega_h is undefined for p = -1")
    a = 1.0 - eta_c
    gc, gh = params.gamma_c, params.gamma_h
    big_x = q * gh + a * gc
    big_y = a * (gc + q * gh) * (a * gc + q * gh)
    return eta_c * big_x / (big_x + math.sqrt(big_y))


@dataclass(frozen=True)
class TaylorCoefficients:
    c1: float
    c2: float
    c3: float | None = None

    def evaluate(self, eta_c: float) -> float:
        total = self.c1 * eta_c + self.c2 * eta_c**2
        if self.c3 is not None:
            total += self.c3 * eta_c**3
        return total


def taylor_one_parameter(scheme: str, params: EngineParams) -> TaylorCoefficients:
    """EMP series coefficients of the one-parameter strong-coupling schemes.

    ``scheme`` is ``fixed_wh``, ``fixed_wc`` or ``sum_constraint``.
    """
    q = 1.0 + params.p
    if not q > 0:
        raise DomainError("series need p > -1")
    gc, gh = params.gamma_c, params.gamma_h
    s = gc + q * gh
    if scheme == "fixed_wh":
        return TaylorCoefficients(
            c1=0.5,
            c2=q * gh / (8 * s),
            c3=q * gh * (2 * gc + q * gh) / (16 * s**2),
        )
    if scheme == "fixed_wc":
        return TaylorCoefficients(
            c1=0.5,
            c2=(gc + 2 * q * gh) / (8 * s),
            c3=(gc**2 + 4 * q * gc * gh + 2 * q**2 * gh**2) / (16 * s**2),
        )
    if scheme == "sum_constraint":
        return TaylorCoefficients(
            c1=0.5,
            c2=(gc + 3 * q * gh) / (16 * s),
            c3=(gc**2 + 10 * q * gc * gh + 5 * q**2 * gh**2) / (64 * s**2),
        )
    raise ValueError(f"no analytic series for scheme {scheme!r}")


_SQRT8 = math.sqrt(8.0)


def optimal_p(params: EngineParams) -> float:
    """Coherence parameter maximising the closed-form power.

    Power depends on q = 1 + p as q / (T2 + b q + c q**2), so the optimum is
    q* = sqrt(T2 / c). The result may fall outside [-1, 1]; see
    :func:`clamp_optimal_p`. ``params.p`` is ignored.
    """
    occ = params.occupations()
    n_c, n_h = occ.n_c, occ.n_h
    ratio = (1 + 3 * n_c + 2 * n_h + 4 * n_c * n_h) / (1 + 3 * n_h + 2 * n_c + 4 * n_c * n_h)
    return _SQRT8 * math.sqrt(ratio) * params.lam / (params.gamma_h * (1 + n_h)) - 1.0


def optimal_p_high_t(params: EngineParams) -> float:
    """Large-occupation limit of :func:`optimal_p`."""
    n_h = params.occupations().n_h
    return _SQRT8 * params.lam / (params.gamma_h * n_h) - 1.0


def optimal_p_low_t(params: EngineParams) -> float:
    """Small-occupation limit of :func:`optimal_p`."""
    return _SQRT8 * params.lam / params.gamma_h - 1.0


def clamp_optimal_p(params: EngineParams) -> tuple[float, str]:
    """Optimal ``p`` restricted to [-1, 1], with an operating advice flag."""
    p_star = optimal_p(params)
    if p_star >= 1.0:
        return 1.0, "operate near p=1"
    if p_star <= -1.0:
        return -1.0, "operate near p=-1"
    return p_star, "interior"


def emp_near_equilibrium_coefficient(params: EngineParams, alpha: float) -> float:
    """Coefficient (1 + M/L')/4 of eta_c**2 for the full engine, in closed form.

    ``alpha`` is the zeroth-order optimal scaled energy, see
    :func:`laserqhe.universality.solve_alpha`. The engine's numerically
    optimised EMP follows ``1/4`` minus this value instead, see
    :func:`laserqhe.universality.emp_second_order_direct`.
    """
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha!r}")
    q = 1.0 + params.p
    gc, gh, lam2 = params.gamma_c, params.gamma_h, params.lam**2
    e = math.exp(alpha)
    em1 = math.expm1(alpha)
    denom = (gc + q * gh) * (q * e**2 * (e - 3) * (e + 1) * gc * gh + 8 * lam2 * em1**2 * (e**2 + 3))
    if denom == 0 or not math.isfinite(denom):
        raise DomainError(f"near-equilibrium coefficient denominator vanishes at alpha={alpha!r}")
    first = e**2 * (em1**2 * gc + q * (e - 5) * (e + 1) * gh) * q * gc * gh
    second = 8 * lam2 * em1**2 * ((e * (e + 2) + 5) * gc + q * (e - 3) * em1 * gh)
    return (first + second) / denom / 8
