"""Flux-based analysis of efficiency at maximum power (EMP) universality.

For a tight-coupling engine with matter flux I(x, y), the EMP expands as

    eta_C/2 + (1 + M / L'(alpha)) eta_C**2 / 4 + O(eta_C**3)

with ``L = -dI/dx`` and ``M = (d2I/dx2) / 2``, both taken in the first
argument on the diagonal x = y, and ``alpha`` the root of
``x = -2 L / L'``. An antisymmetric flux, I(x, y) = -I(y, x), forces
``2M = -L'`` and hence the universal eta_C**2/8 term.

With this orientation ``L`` is negative wherever the engine produces power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .closed_forms import FluxKind, flux
from .exceptions import DomainError, NoRootError, OptimizationError
from .optimize import emp_numeric
from .params import EngineParams

__all__ = [
    "FluxDerivatives",
    "EmpSeries",
    "flux_derivatives",
    "solve_alpha",
    "symmetry_defect",
    "emp_second_order",
    "emp_second_order_direct",
    "extract_emp_series",
    "ETA_GRID",
    "ALPHA_SCAN",
]

FIRST_STEP = 1e-4
SECOND_STEP = 1e-2
ALPHA_SCAN = (1e-3, 50.0)
ETA_GRID = tuple(round(0.02 * k, 2) for k in range(1, 9))

# Fluxes whose alpha equation only has the trivial root alpha -> 0+.
_SCALE_FREE = (FluxKind.HIGH_T, FluxKind.STRONG_COUPLING_HIGH_T)


@dataclass(frozen=True)
class FluxDerivatives:
    l_value: float
    m_value: float
    dl_dx: float
    x_star: float
    diagonal_value: float


def _richardson(estimate, h):
    return (4.0 * estimate(0.5 * h) - estimate(h)) / 3.0


def _eval(kind, x, y, params):
    value = flux(kind, x, y, params)
    if not math.isfinite(value):
        raise DomainError(f"{FluxKind(kind).value} flux is not finite at x={x!r}, y={y!r}")
    return value


def _l_value(kind, x, params, h):
    def central(step):
        return (_eval(kind, x + step, x, params) - _eval(kind, x - step, x, params)) / (2.0 * step)

    return -_richardson(central, h)


def flux_derivatives(kind: FluxKind | str, x: float, params: EngineParams | None = None) -> FluxDerivatives:
    """L, M and dL/dx of a flux at the diagonal point (x, x).

    Central differences with one Richardson level. The first-derivative step
    is 1e-4 x; second-order quantities use 1e-2 x, which keeps the rounding
    error of the double difference below the truncation error.
    """
    kind = FluxKind(kind)
    if not x > 0:
        raise DomainError(f"x must be positive, got {x!r}")
    h1 = FIRST_STEP * x
    h2 = SECOND_STEP * x
    i0 = _eval(kind, x, x, params)

    def second(step):
        return (_eval(kind, x + step, x, params) - 2.0 * i0 + _eval(kind, x - step, x, params)) / step**2

    def diagonal(step):
        up = _l_value(kind, x + step, params, FIRST_STEP * (x + step))
        down = _l_value(kind, x - step, params, FIRST_STEP * (x - step))
        return (up - down) / (2.0 * step)

    l_value = _l_value(kind, x, params, h1)
    scale = max(abs(_eval(kind, x + h2, x, params)), 1e-300) / h2
    if l_value > 1e-8 * scale:
        raise DomainError(
            f"L = {l_value:.6g} > 0 at x={x!r}: the flux should grow with x across the diagonal"
        )
    return FluxDerivatives(
        l_value=l_value,
        m_value=0.5 * _richardson(second, h2),
        dl_dx=_richardson(diagonal, h2),
        x_star=x,
        diagonal_value=i0,
    )


def _alpha_residual(kind, x, params):
    d = flux_derivatives(kind, x, params)
    if d.dl_dx == 0.0:
        return math.nan
    return x + 2.0 * d.l_value / d.dl_dx


def solve_alpha(
    params: EngineParams | None,
    kind: FluxKind | str,
    scan: tuple[float, float] = ALPHA_SCAN,
    points: int = 200,
    tol: float = 1e-10,
) -> float:
    """Root of ``g(x) = x + 2 L(x) / L'(x)``: the near-equilibrium optimal x.

    Sign changes of ``g`` are located on a geometric grid over ``scan`` and
    refined by bisection; a sign change across a pole is rejected. The
    high-temperature fluxes have no positive root (``g`` only vanishes as
    x -> 0+), so the lower end of the scan is returned for them as the
    small-x evaluation point.
    """
    kind = FluxKind(kind)
    lo, hi = scan
    xs = np.geomspace(lo, hi, points)
    gs = []
    for x in xs:
        try:
            gs.append(_alpha_residual(kind, float(x), params))
        except DomainError:
            gs.append(math.nan)
    for i in range(points - 1):
        ga, gb = gs[i], gs[i + 1]
        if not (math.isfinite(ga) and math.isfinite(gb)) or ga * gb > 0:
            continue
        a, b = float(xs[i]), float(xs[i + 1])
        if ga == 0.0:
            return a
        while b - a > tol:
            mid = 0.5 * (a + b)
            gm = _alpha_residual(kind, mid, params)
            if not math.isfinite(gm):
                break
            if (gm > 0) == (ga > 0):
                a, ga = mid, gm
            else:
                b = mid
        root = 0.5 * (a + b)
        if abs(_alpha_residual(kind, root, params)) <= 1e-6 * max(1.0, root):
            return root
    if kind in _SCALE_FREE:
        return lo
    raise NoRootError(f"no root of x + 2L/L' for the {kind.value} flux on [{lo}, {hi}]")


def symmetry_defect(
    kind: FluxKind | str, params: EngineParams | None, sample_count: int = 256
) -> tuple[float, tuple[float, float]]:
    """Largest |I(x, y) + I(y, x)| over a Halton sample of [0.1, 5]^2."""
    if sample_count < 1:
        raise ValueError("sample_count must be at least 1")
    pts = 0.1 + 4.9 * qmc.Halton(d=2, scramble=False).random(sample_count)
    worst, pair = -1.0, (0.0, 0.0)
    for x, y in pts:
        x, y = float(x), float(y)
        defect = abs(flux(kind, x, y, params) + flux(kind, y, x, params))
        if defect > worst:
            worst, pair = defect, (x, y)
    return worst, pair


def _derivatives_at_alpha(params, kind, alpha):
    kind = FluxKind(kind)
    if alpha is None:
        alpha = solve_alpha(params, kind)
    d = flux_derivatives(kind, alpha, params)
    if d.dl_dx == 0.0:
        raise DomainError(f"dL/dx vanishes at alpha={alpha!r}")
    return d


def emp_second_order(params: EngineParams | None, kind: FluxKind | str, alpha: float | None = None) -> float:
    """Coefficient (1 + M/L')/4 of eta_C**2 in the general EMP expansion.

    See :func:`emp_second_order_direct` for the coefficient of this
    engine's actual power optimum; the two coincide when 2M = -L'.
    """
    d = _derivatives_at_alpha(params, kind, alpha)
    return (1.0 + d.m_value / d.dl_dx) / 4.0


def emp_second_order_direct(
    params: EngineParams | None, kind: FluxKind | str, alpha: float | None = None
) -> float:
    """Coefficient -M/(4 L') of eta_C**2 at the optimum of T_h (y - (1-eta_C) x) I(x, y).

    Expanding the stationarity conditions of that power in eta_C gives this
    value, which equals ``1/4 - emp_second_order``. It is what
    :func:`extract_emp_series` measures for a flux without x <-> y
    antisymmetry.
    """
    d = _derivatives_at_alpha(params, kind, alpha)
    return -d.m_value / (4.0 * d.dl_dx)


@dataclass(frozen=True)
class EmpSeries:
    c1: float
    c2: float
    c3: float
    residual: float
    eta_grid: tuple[float, ...]
    emp: tuple[float, ...]
    c4: float = 0.0


def extract_emp_series(
    params: EngineParams,
    scheme: str,
    power_model: str = "full",
    eta_grid: tuple[float, ...] = ETA_GRID,
    tol: float | None = None,
) -> EmpSeries:
    """Fit EMP/eta_C = c1 + c2 eta_C + c3 eta_C**2 + c4 eta_C**3 to numerical optima.

    ``t_h`` stays fixed and ``t_c = t_h (1 - eta_C)`` is varied. The cubic
    term only absorbs truncation error; without it c3 is biased by ~20% on
    the default grid. ``residual`` is the largest fit error relative to the
    largest EMP.
    """
    etas = np.asarray(eta_grid, dtype=float)
    values = []
    for eta in etas:
        point = params.replace(t_c=params.t_h * (1.0 - eta))
        try:
            values.append(emp_numeric(point, scheme, power_model, tol=tol))
        except OptimizationError as exc:
            raise OptimizationError(f"eta_C={eta}: {exc}", best=exc.best) from exc
    values = np.array(values)
    design = np.vander(etas, 4, increasing=True)
    coef, *_ = np.linalg.lstsq(design, values / etas, rcond=None)
    fitted = design @ coef * etas
    residual = float(np.max(np.abs(fitted - values)) / np.max(np.abs(values)))
    return EmpSeries(
        c1=float(coef[0]),
        c2=float(coef[1]),
        c3=float(coef[2]),
        c4=float(coef[3]),
        residual=residual,
        eta_grid=tuple(float(e) for e in etas),
        emp=tuple(float(v) for v in values),
    )
