"""Exception hierarchy shared by the numerical core and the CLI."""


class TomographyError(Exception):
    """Base class. ``stage`` names the pipeline step that raised, when known."""

    def __init__(self, message, stage=None):
        super().__init__(message)
        self.message = message
        self.stage = stage

    def __str__(self):
        if self.stage:
            return f"[{self.stage}] {self.message}"
        return self.message


class DimensionMismatch(TomographyError, ValueError):
    pass


class NotADensityMatrix(TomographyError, ValueError):
    pass


class RankDeficient(TomographyError, ValueError):
    """A full-rank state was required but an eigenvalue fell below tolerance."""


class SupportViolation(TomographyError, ValueError):
    """The first argument of a relative entropy has weight outside the support
    of the second, so the divergence is infinite."""


class Infeasible(TomographyError):
    """No state reproduces the requested expectation values."""


class MaxIterations(TomographyError):
    pass


class EigenNonConvergence(TomographyError):
    pass


class OutOfRange(TomographyError, ValueError):
    pass


class ConsistencyError(TomographyError):
    """Two routes to the same quantity disagree beyond tolerance."""
