"""Exception hierarchy shared by all modules."""


class EngineError(Exception):
    """Base class for every error raised by this package."""


class DomainError(EngineError, ValueError):
    """An argument lies outside the domain of a formula."""


class SolverError(EngineError):
    """A steady-state linear solve failed or was too ill-conditioned to trust."""


class DegenerateSteadyStateError(SolverError):
    """The Liouvillian has more than one stationary state."""


class StepSizeError(EngineError):
    """Time integration drifted off the density-matrix manifold."""


class InconsistentStateError(EngineError):
    """A density matrix violates an invariant an observable relies on."""


class NoRootError(EngineError):
    """A scalar root search found no sign change."""


class OptimizationError(EngineError):
    """An optimizer exhausted its budget; ``best`` holds the best point seen."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
