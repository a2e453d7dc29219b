"""Deterministic derivative-free maximisation of engine power.

:func:`maximize_1d` is a golden-section search with a coarse grid audit,
:func:`maximize_2d` a Nelder-Mead simplex. :func:`optimize_power` wires them
to the power models and optimisation schemes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .closed_forms import power_low_t, power_strong_ht
from .exceptions import DomainError, OptimizationError
from .observables import efficiency, power_closed_form
from .params import EngineParams

__all__ = [
    "SCHEMES",
    "POWER_MODELS",
    "OptimizationResult",
    "PowerOptimum",
    "maximize_1d",
    "maximize_2d",
    "maximize_constrained",
    "optimize_power",
    "emp_numeric",
]

SCHEMES = ("fixed_wh", "fixed_wc", "two_param", "sum_constraint", "product_constraint", "over_p")
POWER_MODELS = ("full", "strong_ht", "low_t")

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
AUDIT_POINTS = 64


@dataclass(frozen=True)
class OptimizationResult:
    argmax: tuple[float, ...]
    max_value: float
    evaluations: int
    converged: bool
    scheme: str | None = None
    warnings: tuple[str, ...] = ()


class _Counted:
    """Wraps an objective, counts calls and maps NaN to -inf."""

    def __init__(self, fn):
        self.fn = fn
        self.calls = 0

    def __call__(self, *args):
        self.calls += 1
        value = self.fn(*args)
        if value != value:  # NaN
            return -math.inf
        return value


def _audit(objective, lo, hi, best):
    xs = lo + (hi - lo) * (np.arange(AUDIT_POINTS) + 0.5) / AUDIT_POINTS
    ys = np.array([objective(x) for x in xs])
    notes = []
    peaks = 0
    for i in range(AUDIT_POINTS):
        left = ys[i - 1] if i > 0 else -math.inf
        right = ys[i + 1] if i < AUDIT_POINTS - 1 else -math.inf
        if ys[i] > left and ys[i] > right:
            peaks += 1
    if peaks > 1:
        notes.append(f"grid audit found {peaks} local maxima; objective may be multimodal")
    if ys.max() > best + 1e-12 * max(1.0, abs(best)):
        notes.append(f"grid audit found a higher value {ys.max():.12g} at {xs[ys.argmax()]:.12g}")
    return notes


def maximize_1d(
    objective: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-10,
    scheme: str | None = None,
    max_iter: int = 500,
    audit: bool = True,
) -> OptimizationResult:
    """Golden-section maximisation on [lo, hi] down to bracket width ``tol``."""
    if not lo < hi:
        raise DomainError(f"empty search window [{lo!r}, {hi!r}]")
    f = _Counted(objective)
    a, b = float(lo), float(hi)
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    it = 0
    while b - a > tol and it < max_iter:
        it += 1
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    fx = f(x)
    converged = b - a <= tol
    notes = _audit(f, lo, hi, fx) if audit else []
    return OptimizationResult(
        argmax=(x,),
        max_value=fx,
        evaluations=f.calls,
        converged=converged,
        scheme=scheme,
        warnings=tuple(notes),
    )


def _nelder_mead(f, x0, scale, tol, max_evals):
    n = len(x0)
    simplex = [np.asarray(x0, dtype=float)]
    for i in range(n):
        v = simplex[0].copy()
        v[i] += scale
        simplex.append(v)
    # minimise the negated objective
    values = [-f(*v) for v in simplex]
    while True:
        order = np.argsort(values, kind="stable")
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        diameter = max(float(np.max(np.abs(v - simplex[0]))) for v in simplex[1:])
        if diameter <= tol:
            return simplex[0], -values[0], True
        if f.calls >= max_evals:
            return simplex[0], -values[0], False
        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]
        xr = centroid + (centroid - worst)
        fr = -f(*xr)
        if values[0] <= fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[0]:
            xe = centroid + 2.0 * (centroid - worst)
            fe = -f(*xe)
            if fe < fr:
                simplex[-1], values[-1] = xe, fe
            else:
                simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[-1]:
            xc = centroid + 0.5 * (xr - centroid)
            fcon = -f(*xc)
            if fcon <= fr:
                simplex[-1], values[-1] = xc, fcon
                continue
        else:
            xc = centroid + 0.5 * (worst - centroid)
            fcon = -f(*xc)
            if fcon < values[-1]:
                simplex[-1], values[-1] = xc, fcon
                continue
        best = simplex[0]
        for i in range(1, n + 1):
            simplex[i] = best + 0.5 * (simplex[i] - best)
            values[i] = -f(*simplex[i])


def maximize_2d(
    objective: Callable[[float, float], float],
    init: tuple[float, float],
    scale: float = 0.1,
    tol: float = 1e-8,
    scheme: str | None = None,
    max_evals: int = 20000,
) -> OptimizationResult:
    """Nelder-Mead maximisation of ``objective(u, v)`` started at ``init``.

    After convergence the simplex is rebuilt around the optimum and the
    search is repeated once. Raises :class:`OptimizationError` carrying the
    best point seen when the evaluation budget runs out.
    """
    f = _Counted(objective)
    x, fx, ok = _nelder_mead(f, init, scale, tol, max_evals)
    if ok:
        restart_scale = max(100.0 * tol, 1e-3 * scale)
        x, fx, ok = _nelder_mead(f, x, restart_scale, tol, max_evals + f.calls)
    if not ok:
        best = OptimizationResult(
            argmax=tuple(float(v) for v in x),
            max_value=float(fx),
            evaluations=f.calls,
            converged=False,
            scheme=scheme,
        )
        raise OptimizationError(f"simplex did not converge in {max_evals} evaluations", best=best)
    point = tuple(float(v) for v in x)
    return OptimizationResult(
        argmax=point,
        max_value=float(f(*point)),
        evaluations=f.calls,
        converged=True,
        scheme=scheme,
    )


def maximize_constrained(
    objective: Callable[[float, float], float],
    constraint: str,
    k: float,
    tol: float = 1e-10,
    window: tuple[float, float] | None = None,
) -> OptimizationResult:
    """Maximise ``objective(omega_c, omega_h)`` on a symmetric constraint curve.

    ``constraint`` is ``sum`` (omega_c + omega_h = k) or ``product``
    (omega_c * omega_h = k). The search runs over omega_c in ``window``,
    by default the part of the curve with 0 < omega_c < omega_h.
    """
    if not k > 0:
        raise DomainError(f"constraint value must be positive, got {k!r}")
    if constraint == "sum":
        partner = lambda wc: k - wc  # noqa: E731
        default = (1e-6 * k, 0.5 * k)
        name = "sum_constraint"
    elif constraint == "product":
        partner = lambda wc: k / wc  # noqa: E731
        default = (1e-6 * math.sqrt(k), math.sqrt(k))
        name = "product_constraint"
    else:
        raise ValueError(f"unknown constraint {constraint!r}")
    lo, hi = window if window is not None else default
    if not 0 < lo < hi or partner(lo) <= 0 or partner(hi) <= 0:
        raise DomainError(f"infeasible window ({lo!r}, {hi!r}) for {constraint} = {k!r}")
    return maximize_1d(lambda wc: objective(wc, partner(wc)), lo, hi, tol=tol, scheme=name)


@dataclass(frozen=True)
class PowerOptimum:
    """Outcome of a power optimisation, with the optimal frequencies."""

    result: OptimizationResult
    omega_c: float
    omega_h: float
    p: float
    emp: float
    model: str
    notes: tuple[str, ...] = field(default=())


def _frequency_objective(params: EngineParams, model: str):
    if model == "full":
        def power(wc, wh):
            if not (wc > 0 and wh > 0):
                return -math.inf
            return power_closed_form(params.replace(omega_c=wc, omega_h=wh))
    elif model == "strong_ht":
        def power(wc, wh):
            if not (wc > 0 and wh > 0):
                return -math.inf
            return power_strong_ht(wc, wh, params)
    elif model == "low_t":
        eta = params.carnot

        def power(wc, wh):
            return power_low_t(wc / params.t_c, wh / params.t_h, eta, params.t_h)
    else:
        raise ValueError(f"unknown power model {model!r}")
    return power


def _check_compatible(scheme, model):
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    if model not in POWER_MODELS:
        raise ValueError(f"unknown power model {model!r}")
    if model == "low_t" and scheme != "two_param":
        raise DomainError("the low-temperature model is only optimised over both frequencies")
    if model == "strong_ht" and scheme == "two_param":
        raise DomainError("strong-coupling power is homogeneous in the frequencies and has no two-parameter maximum")
    if scheme == "over_p" and model != "full":
        raise DomainError("optimisation over p uses the full power model")


# Upper edge of frequency windows in units of the matching temperature.
OMEGA_MAX_FACTOR = 50.0
OMEGA_MIN_FACTOR = 1e-6


def optimize_power(
    params: EngineParams,
    scheme: str,
    model: str = "full",
    tol: float | None = None,
) -> PowerOptimum:
    """Maximise power under ``scheme`` with the ``model`` power function.

    One-parameter schemes keep the other frequency of ``params`` fixed;
    constrained schemes take k from the frequencies in ``params``.
    """
    _check_compatible(scheme, model)
    power = _frequency_objective(params, model)
    wc0, wh0, tc, th = params.omega_c, params.omega_h, params.t_c, params.t_h
    eps = OMEGA_MIN_FACTOR * tc

    if scheme == "over_p":
        res = maximize_1d(
            lambda p: power_closed_form(params.replace(p=p)), -1.0, 1.0, tol=tol or 1e-10, scheme=scheme
        )
        return PowerOptimum(res, wc0, wh0, res.argmax[0], efficiency(params), model, res.warnings)

    if scheme == "fixed_wh":
        res = maximize_1d(lambda wc: power(wc, wh0), eps, wh0, tol=tol or 1e-10, scheme=scheme)
        wc, wh = res.argmax[0], wh0
    elif scheme == "fixed_wc":
        res = maximize_1d(
            lambda wh: power(wc0, wh), wc0, OMEGA_MAX_FACTOR * th, tol=tol or 1e-10, scheme=scheme
        )
        wc, wh = wc0, res.argmax[0]
    elif scheme == "sum_constraint":
        k = wc0 + wh0
        res = maximize_constrained(power, "sum", k, tol=tol or 1e-10, window=(eps, 0.5 * k))
        wc, wh = res.argmax[0], k - res.argmax[0]
    elif scheme == "product_constraint":
        k = wc0 * wh0
        res = maximize_constrained(power, "product", k, tol=tol or 1e-10, window=(eps, math.sqrt(k)))
        wc, wh = res.argmax[0], k / res.argmax[0]
    else:
        res, wc, wh = _two_param(params, model, tol or 1e-8)
    emp = 1.0 - wc / wh
    return PowerOptimum(res, wc, wh, params.p, emp, model, res.warnings)


def _two_param(params, model, tol):
    # searched in scaled energies (x, y); both models are O(1) there
    tc, th = params.t_c, params.t_h
    eta = params.carnot
    x_max = OMEGA_MAX_FACTOR * th / tc
    if model == "low_t":
        def objective(x, y):
            if not (0 < x < x_max and 0 < y < x_max):
                return -math.inf
            return power_low_t(x, y, eta, th)
        init = (2.0, 2.0 * (1.0 - 0.5 * eta))
    else:
        def objective(x, y):
            if not (0 < x < x_max and 0 < y < x_max):
                return -math.inf
            return power_closed_form(params.replace(omega_c=x * tc, omega_h=y * th))
        x0 = params.omega_c / tc
        y0 = params.omega_h / th
        init = (x0, y0) if x0 > y0 else (2.0, 2.0 * (1.0 - 0.5 * eta))
    res = maximize_2d(objective, init, scale=0.1, tol=tol, scheme="two_param")
    x, y = res.argmax
    return res, x * tc, y * th


def emp_numeric(params: EngineParams, scheme: str, power_model: str = "full", tol: float | None = None) -> float:
    """Efficiency at the numerically located power maximum."""
    opt = optimize_power(params, scheme, power_model, tol=tol)
    if not opt.result.converged:
        raise OptimizationError(f"{scheme} optimisation did not converge", best=opt.result)
    return opt.emp
