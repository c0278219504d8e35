"""Exception hierarchy shared by all modules."""


class PoissonNewtonError(Exception):
    """Base class; the CLI maps it to a data error exit code."""


class NearZeroDenominator(PoissonNewtonError):
    pass


class ExplosionGuard(PoissonNewtonError):
    pass


class ContourTooClose(PoissonNewtonError):
    pass


class NonIntegerWinding(PoissonNewtonError):
    pass


class RefinementStall(PoissonNewtonError):
    pass


class TailTooLarge(PoissonNewtonError):
    pass


class QuadratureStall(PoissonNewtonError):
    pass


class CoverageGap(PoissonNewtonError):
    pass


class PoleError(PoissonNewtonError, ValueError):
    pass


class FormatError(PoissonNewtonError, ValueError):
    pass


class OrderError(PoissonNewtonError, ValueError):
    pass


class RootSolveFailure(PoissonNewtonError):
    pass


class SeriesSpecError(PoissonNewtonError, ValueError):
    """Raised while validating a series spec; the message names the field."""
