"""Exception hierarchy shared by all modules."""


class HeunError(Exception):
    """Base class for every error raised by :mod:`symheun`."""


class DegeneratePoint(HeunError, ValueError):
    """Coincident points, or an evaluation point on top of a singular point."""


class ZeroSingularPoint(HeunError, ValueError):
    """A singular point sits at the origin, where the Taylor expansion lives."""


class DegenerateCrossRatio(HeunError, ValueError):
    pass


class SingularMap(HeunError, ValueError):
    pass


class CollidingPlacement(HeunError, ValueError):
    pass


class IndexTooSmall(HeunError, ValueError):
    pass


class BranchAmbiguity(HeunError, ValueError):
    pass


class ClearanceViolation(HeunError, ValueError):
    pass


class OutOfDomain(HeunError, ValueError):
    pass


class ProbeFailure(HeunError, ArithmeticError):
    """The probe-extracted accessory parameter is inconsistent between probes.

    This signals an algebra bug, not bad user input.
    """


class NumericalFailure(HeunError, ArithmeticError):
    """Base for failures that map to CLI exit status 3."""


class NotConverged(NumericalFailure):
    pass


class NoConvergence(NumericalFailure):
    pass


class StepUnderflow(NumericalFailure):
    pass


class QuadratureNotConverged(NumericalFailure):
    pass


class ReturnsFewer(NumericalFailure):
    """Fewer eigenvalues than requested were found in the search region."""

    def __init__(self, message, found=()):
        super().__init__(message)
        self.found = list(found)


class EngineDisagreement(HeunError, ArithmeticError):
    """The closed-form recurrence and the derived one disagree.

    ``solution`` carries the oracle-engine result and ``report`` the erratum.
    """

    def __init__(self, message, solution=None, report=None):
        super().__init__(message)
        self.solution = solution
        self.report = report
