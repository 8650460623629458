"""Exception types shared across the package."""


class RelperfError(Exception):
    """Base class for solver-specific failures."""


class SingularJacobianError(RelperfError):
    """A Newton step could not be computed because the Jacobian is singular."""


class MaxIterationsExceeded(RelperfError):
    """The damped Newton solver ran out of iterations.

    Carries the best iterate found so far and its residual, so the caller
    can distinguish slow convergence from a target outside the range of
    the wealth map (in which case no equilibrium exists).
    """

    def __init__(self, message, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual


class RootBracketError(RelperfError):
    """A monotone scalar root-finder failed to bracket its root.

    Should be impossible under the type invariants; treated as an
    internal error and reported with the bracket state.
    """


class VerificationFailed(RelperfError):
    """A solved profile failed the first-order-condition/budget check."""

    def __init__(self, message, foc_residual=None, budget_residual=None):
        super().__init__(message)
        self.foc_residual = foc_residual
        self.budget_residual = budget_residual


class InternalConsistencyError(RelperfError):
    """Two independent computations of the same quantity disagree."""
