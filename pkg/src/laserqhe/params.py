"""Engine parameters, Planck occupations and parameter validation.

Natural units are used throughout (hbar = k_B = 1): frequencies, rates and
temperatures are bare numbers.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from .exceptions import DomainError

__all__ = [
    "EngineParams",
    "BathOccupations",
    "DimensionlessPoint",
    "ValidationReport",
    "planck_occupation",
    "carnot",
    "validate",
    "FIG2_PARAMS",
    "FIG3_PARAMS",
]

# Largest omega/temp for which expm1 stays finite in double precision.
_EXP_OVERFLOW = 709.0


@dataclass(frozen=True)
class EngineParams:
    """Physical controls of the four-level engine.

    ``lam`` is the matter-field coupling (``lambda`` is a Python keyword).
    ``p`` is the noise-induced coherence parameter, the cosine of the angle
    between the two hot dipoles. Both hot branches share ``gamma_h``.
    """

    omega_c: float
    omega_h: float
    gamma_c: float
    gamma_h: float
    lam: float
    p: float
    t_c: float
    t_h: float

    def replace(self, **changes) -> "EngineParams":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    def occupations(self) -> "BathOccupations":
        return BathOccupations(
            n_c=planck_occupation(self.omega_c, self.t_c),
            n_h=planck_occupation(self.omega_h, self.t_h),
        )

    def scaled(self) -> "DimensionlessPoint":
        return DimensionlessPoint(x=self.omega_c / self.t_c, y=self.omega_h / self.t_h)

    @property
    def carnot(self) -> float:
        return carnot(self)


@dataclass(frozen=True)
class BathOccupations:
    n_c: float
    n_h: float


@dataclass(frozen=True)
class DimensionlessPoint:
    """Scaled energies x = omega_c/T_c and y = omega_h/T_h."""

    x: float
    y: float

    def occupations(self) -> BathOccupations:
        return BathOccupations(n_c=1.0 / math.expm1(self.x), n_h=1.0 / math.expm1(self.y))

    @property
    def engine_regime(self) -> bool:
        return self.x > self.y


def planck_occupation(omega: float, temp: float) -> float:
    """Mean photon number 1/(exp(omega/temp) - 1) of a thermal mode."""
    if not omega > 0:
        raise DomainError(f"frequency must be positive, got {omega!r}")
    if not temp > 0:
        raise DomainError(f"temperature must be positive, got {temp!r}")
    ratio = omega / temp
    if ratio > _EXP_OVERFLOW:
        return math.exp(-ratio)
    return 1.0 / math.expm1(ratio)


def carnot(params: EngineParams) -> float:
    if not params.t_c > 0:
        raise DomainError(f"cold temperature must be positive, got {params.t_c!r}")
    if params.t_c >= params.t_h:
        raise DomainError(f"need t_c < t_h, got t_c={params.t_c!r}, t_h={params.t_h!r}")
    return 1.0 - params.t_c / params.t_h


@dataclass(frozen=True)
class ValidationReport:
    params: EngineParams
    mode: str
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate(params: EngineParams, mode: str = "engine") -> ValidationReport:
    """Collect every violated parameter invariant without raising.

    ``unrestricted`` checks positivity and the range of ``p``; ``engine``
    additionally requires ``omega_h > omega_c`` and ``t_h > t_c``. The
    zero-power boundary omega_c/omega_h = t_c/t_h is not checked here.
    """
    if mode not in ("engine", "unrestricted"):
        raise ValueError(f"unknown validation mode {mode!r}")
    problems = []

    def finite(name, value):
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            problems.append(f"{name} must be a finite number")
            return False
        return True

    for name in ("omega_c", "omega_h"):
        value = getattr(params, name)
        if finite(name, value) and value <= 0:
            problems.append(f"frequency must be positive: {name}={value}")
    for name in ("gamma_c", "gamma_h"):
        value = getattr(params, name)
        if finite(name, value) and value <= 0:
            problems.append(f"rate must be positive: {name}={value}")
    for name in ("t_c", "t_h"):
        value = getattr(params, name)
        if finite(name, value) and value <= 0:
            problems.append(f"temperature must be positive: {name}={value}")
    if finite("lam", params.lam) and params.lam < 0:
        problems.append(f"coupling must be non-negative: lam={params.lam}")
    if finite("p", params.p) and not -1.0 <= params.p <= 1.0:
        problems.append(f"p out of [-1,1]: p={params.p}")

    if mode == "engine" and not problems:
        if params.omega_h <= params.omega_c:
            problems.append("engine mode needs omega_h > omega_c")
        if params.t_h <= params.t_c:
            problems.append("engine mode needs t_h > t_c")
    return ValidationReport(params=params, mode=mode, violations=tuple(problems))


# Parameter sets quoted in the captions of the power-vs-p and EMP-vs-p figures.
FIG2_PARAMS = EngineParams(
    omega_c=7.0, omega_h=10.0, gamma_c=0.25, gamma_h=0.5, lam=0.1, p=0.0, t_c=6.0, t_h=10.0
)
FIG3_PARAMS = EngineParams(
    omega_c=7.0, omega_h=10.0, gamma_c=1.0, gamma_h=0.5, lam=0.1, p=0.0, t_c=6.0, t_h=10.0
)
