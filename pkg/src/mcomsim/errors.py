"""Exception types raised across the simulation pipeline."""


class ParameterError(ValueError):
    """A system parameter violates one of its invariants."""

    def __init__(self, field, message):
        super().__init__(message)
        self.field = field


class NonConvergence(RuntimeError):
    """The mean-field fixed-point iteration did not converge."""

    def __init__(self, message, residual=float("nan"), iterations=0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class Diverged(RuntimeError):
    """A time integration blew past the overflow guard (unstable dynamics)."""


class EigenvalueFailure(RuntimeError):
    """The eigensolver failed to converge on a drift matrix."""


class UnstableSystem(RuntimeError):
    """A steady-state covariance was requested for an unstable drift matrix."""


class SingularSolve(RuntimeError):
    """The Lyapunov solve was numerically singular (marginal stability)."""


class NonPhysicalState(ValueError):
    """A two-mode covariance matrix is too unphysical to evaluate."""
