"""Exception hierarchy shared by every module of the package."""


class RotSymError(Exception):
    """Base class for all domain errors raised by :mod:`rotsym`."""


class MalformedPieces(RotSymError, ValueError):
    """Profile pieces do not tile ``[r0, inf)`` or carry non-finite values."""


class InadmissibleProfile(RotSymError):
    """A structurally valid profile failed an admissibility check."""

    def __init__(self, report):
        self.report = report
        failed = ", ".join(report.failures()) or "unknown"
        super().__init__(f"profile is not admissible: {failed}")


class OutOfDomain(RotSymError, ValueError):
    pass


class CornerDerivative(RotSymError):
    """Derivative requested exactly at a kink without choosing a side."""


class NumericalDomain(RotSymError):
    pass


class SingularAtHorizon(RotSymError):
    pass


class QuadratureFailure(RotSymError):
    pass


class InfeasibleParameters(RotSymError, ValueError):
    pass


class UnboundedTail(RotSymError):
    pass


class DeltaOutOfRange(RotSymError, ValueError):
    pass


class TubeEscapesRegion(RotSymError, ValueError):
    pass
