"""Four-level laser quantum heat engine with noise-induced coherence.

Steady states come from a reduced linear system or the full Liouvillian;
power, efficiency and their optima follow from those states or from closed
forms. :mod:`laserqhe.universality` studies the efficiency at maximum power
through the flux formalism.
"""

from .closed_forms import (
    FluxKind,
    clamp_optimal_p,
    emp_fixed_wh,
    emp_low_t,
    flux,
    optimal_p,
    taylor_one_parameter,
)
from .exceptions import (
    DegenerateSteadyStateError,
    DomainError,
    EngineError,
    InconsistentStateError,
    NoRootError,
    OptimizationError,
    SolverError,
    StepSizeError,
)
from .liouvillian import evolve, maximally_mixed, solve_steady_full, solve_steady_reduced
from .observables import efficiency, observables, power_closed_form
from .optimize import emp_numeric, optimize_power
from .params import FIG2_PARAMS, FIG3_PARAMS, EngineParams, planck_occupation, validate
from .universality import (
    emp_second_order,
    emp_second_order_direct,
    extract_emp_series,
    flux_derivatives,
    solve_alpha,
    symmetry_defect,
)

__version__ = "0.1.0"

__all__ = [
    "EngineParams",
    "FIG2_PARAMS",
    "FIG3_PARAMS",
    "planck_occupation",
    "validate",
    "solve_steady_reduced",
    "solve_steady_full",
    "evolve",
    "maximally_mixed",
    "observables",
    "efficiency",
    "power_closed_form",
    "FluxKind",
    "flux",
    "emp_low_t",
    "emp_fixed_wh",
    "taylor_one_parameter",
    "optimal_p",
    "clamp_optimal_p",
    "optimize_power",
    "emp_numeric",
    "flux_derivatives",
    "solve_alpha",
    "symmetry_defect",
    "emp_second_order",
    "emp_second_order_direct",
    "extract_emp_series",
    "EngineError",
    "DomainError",
    "SolverError",
    "DegenerateSteadyStateError",
    "StepSizeError",
    "InconsistentStateError",
    "NoRootError",
    "OptimizationError",
]
