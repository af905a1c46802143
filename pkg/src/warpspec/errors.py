"""Exception hierarchy shared by the solver, constructors and certificates."""


class WarpspecError(Exception):
    """Base class for every error raised by this package."""


class DomainError(WarpspecError, ValueError):
    """A radial evaluation was requested outside the admissible interval."""


class IntegrationError(WarpspecError, RuntimeError):
    """The ODE integrator failed to reach the requested radius."""

    def __init__(self, message, t_fail=None):
        super().__init__(message)
        self.t_fail = t_fail


class BracketError(WarpspecError, RuntimeError):
    """No eigenvalue bracket was found below the configured ceiling."""


class ConstructionError(WarpspecError, ValueError):
    """A warping profile could not be built from the supplied data."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class GridError(WarpspecError, ValueError):
    """A comparison grid is too coarse or otherwise unusable."""


class FitError(WarpspecError, ValueError):
    """A small-radius expansion fit is ill-conditioned or inconsistent."""


class HypothesisViolation(WarpspecError):
    """The pointwise hypothesis of a comparison theorem fails on the grid.

    This is a legitimate mathematical outcome rather than a bug; ``witness``
    is the radius where the hypothesis fails worst.
    """

    def __init__(self, message, witness=None, margin=None):
        super().__init__(message)
        self.witness = witness
        self.margin = margin


class TheoremViolation(WarpspecError, AssertionError):
    """A proven inequality failed numerically: always an implementation bug
    or a misconfigured tolerance."""

    def __init__(self, message, traces=None):
        super().__init__(message)
        self.traces = traces or {}
