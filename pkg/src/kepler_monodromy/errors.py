"""Exception hierarchy shared by all modules."""


class KeplerMonodromyError(Exception):
    pass


# cplx_path
class PathThroughZero(KeplerMonodromyError):
    pass


class BadInitialRoot(KeplerMonodromyError, ValueError):
    pass


class RootCollision(KeplerMonodromyError):
    pass


class DegenerateLeadingCoefficient(KeplerMonodromyError):
    pass


class ToleranceNotMet(KeplerMonodromyError):
    pass


class IntegrandSingular(KeplerMonodromyError):
    pass


# phase space
class ZeroGroupElement(KeplerMonodromyError, ValueError):
    pass


class RelationViolated(KeplerMonodromyError, ValueError):
    pass


class InvalidPhasePoint(KeplerMonodromyError, ValueError):
    pass


# curves / periods
class DegenerateFiber(KeplerMonodromyError):
    pass


class CycleCollision(KeplerMonodromyError):
    pass


class RankDeficient(KeplerMonodromyError):
    pass


# continuation
class BadRadius(KeplerMonodromyError, ValueError):
    pass


class SampleOnSingularLocus(KeplerMonodromyError):
    pass


class ContinuityLost(KeplerMonodromyError):
    pass


class NonIntegerCoefficients(KeplerMonodromyError):
    pass


class IllConditionedBasis(KeplerMonodromyError):
    pass


# flows
class CollisionApproach(KeplerMonodromyError):
    pass


class StepUnderflow(KeplerMonodromyError):
    pass
