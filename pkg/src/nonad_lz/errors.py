"""Exception and warning types raised across the package."""


class NonadError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(NonadError, ValueError):
    """A physical or numerical parameter is outside its allowed range."""


class DegenerateModelError(NonadError, ValueError):
    """The Hamiltonian has a vanishing off-diagonal coupling."""


class DomainError(NonadError, ValueError):
    """A function was evaluated outside its domain of validity."""


class CriticalDampingError(DomainError):
    """Raised at gamma_tilde == 1, where the two branch-point families merge."""


class RegimeError(NonadError, ValueError):
    """An operation was requested for the wrong damping regime."""


class DivergenceError(NonadError, ValueError):
    """An improper integral does not converge."""


class PathError(NonadError, RuntimeError):
    """A contour passes through (or too close to) a branch point."""


class EmptySumError(NonadError, RuntimeError):
    """No branch point contributes to the generalized DDP sum."""


class ConvergenceError(NonadError, RuntimeError):
    """An iterative solver gave up. ``diagnostics`` holds the state at exit."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class BranchAmbiguityWarning(UserWarning):
    """Value depends on a branch convention that the model does not fix."""


class ExperimentalSweepWarning(UserWarning):
    """Sweep profile outside the tested power-law family."""
