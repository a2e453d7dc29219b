"""Power, hot heat flux and efficiency of the engine.

Both fluxes are proportional to the coherence current
``s = i[(rho_01 - rho_10) + (rho_02 - rho_20)]``: power is
``(omega_h - omega_c) * lam * s`` and the hot heat flux ``omega_h * lam * s``.
The sign is chosen so that engine-mode power is positive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, InconsistentStateError
from .liouvillian import E0, E1, E2
from .params import EngineParams

__all__ = [
    "Observables",
    "coherence_current",
    "power_from_state",
    "hot_heat_flux_from_state",
    "observables",
    "power_terms",
    "power_closed_form",
    "power_occupation_form",
    "steady_coherence",
    "efficiency",
]

IMAG_TOL = 1e-10


@dataclass(frozen=True)
class Observables:
    power: float
    hot_heat_flux: float
    efficiency: float
    coherence_current: float


def coherence_current(state: np.ndarray) -> float:
    r = np.asarray(state)
    s = 1j * ((r[E0, E1] - r[E1, E0]) + (r[E0, E2] - r[E2, E0]))
    if abs(s.imag) > IMAG_TOL:
        raise InconsistentStateError(f"coherence current has imaginary part {s.imag:.3g}")
    return float(s.real)


def power_from_state(params: EngineParams, state: np.ndarray) -> float:
    return (params.omega_h - params.omega_c) * params.lam * coherence_current(state)


def hot_heat_flux_from_state(params: EngineParams, state: np.ndarray) -> float:
    return params.omega_h * params.lam * coherence_current(state)


def efficiency(params: EngineParams) -> float:
    """Efficiency 1 - omega_c/omega_h, independent of the state."""
    if not params.omega_h > 0:
        raise DomainError("omega_h must be positive")
    return 1.0 - params.omega_c / params.omega_h


def observables(params: EngineParams, state: np.ndarray) -> Observables:
    s = coherence_current(state)
    return Observables(
        power=(params.omega_h - params.omega_c) * params.lam * s,
        hot_heat_flux=params.omega_h * params.lam * s,
        efficiency=efficiency(params),
        coherence_current=s,
    )


def power_terms(params: EngineParams) -> tuple[float, float, float, float]:
    """Denominator terms (T1, T2, T3, T4) of the closed-form power.

    T1 and T2 carry the drive (lam**2), T3 and T4 are pure dissipation.
    """
    occ = params.occupations()
    n_c, n_h = occ.n_c, occ.n_h
    q = 1.0 + params.p
    gc, gh, lam2 = params.gamma_c, params.gamma_h, params.lam**2
    t1 = 8 * lam2 * gh * (1 + n_h) * (1 + 4 * n_h) * q
    t2 = 8 * lam2 * gc * (1 + 3 * n_c + 2 * n_h + 4 * n_c * n_h)
    t3 = gc**2 * gh * (1 + n_c) * (1 + n_h) * (1 + 3 * n_h + n_c * (2 + 4 * n_h)) * q
    t4 = gc * gh**2 * (1 + n_h) ** 2 * (1 + 2 * n_c + 3 * n_h + 4 * n_c * n_h) * q**2
    return t1, t2, t3, t4


def power_closed_form(params: EngineParams) -> float:
    """Steady-state power without solving for the density matrix."""
    occ = params.occupations()
    n_c, n_h = occ.n_c, occ.n_h
    q = 1.0 + params.p
    denom = sum(power_terms(params))
    if q == 0.0 or params.lam == 0.0:
        return 0.0
    if not denom > 0:
        raise DomainError(f"closed-form power denominator is {denom!r}")
    num = 8 * (n_h - n_c) * (1 + n_h) * q * params.gamma_c * params.gamma_h * params.lam**2
    return num * (params.omega_h - params.omega_c) / denom


def _a_b_occupation(params):
    occ = params.occupations()
    n_c, n_h = occ.n_c, occ.n_h
    q = 1.0 + params.p
    gc, gh = params.gamma_c, params.gamma_h
    a = q * gc * gh * (n_h + 1) * (n_c * (4 * n_h + 2) + 3 * n_h + 1) * (gc * (n_c + 1) + q * gh * (n_h + 1))
    b = 8 * params.lam**2 * (gc * (n_c * (4 * n_h + 3) + 2 * n_h + 1) + q * gh * (4 * n_h**2 + 5 * n_h + 1))
    return a, b


def power_occupation_form(params: EngineParams) -> float:
    """Same power, written with the expanded A + B denominator.

    Kept separate from :func:`power_closed_form` so the two algebraic
    arrangements can be checked against each other.
    """
    occ = params.occupations()
    a, b = _a_b_occupation(params)
    if a + b == 0.0:
        return 0.0
    q = 1.0 + params.p
    num = 8 * params.lam**2 * q * params.gamma_h * params.gamma_c * (occ.n_h + 1) * (occ.n_h - occ.n_c)
    return num * (params.omega_h - params.omega_c) / (a + b)


def steady_coherence(params: EngineParams) -> complex:
    """Closed-form steady value of rho_10 (equal to rho_20)."""
    occ = params.occupations()
    a, b = _a_b_occupation(params)
    if a + b == 0.0:
        return 0j
    q = 1.0 + params.p
    return -2j * params.lam * q * params.gamma_c * params.gamma_h * (occ.n_h + 1) * (occ.n_c - occ.n_h) / (a + b)

