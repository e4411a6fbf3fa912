"""Exception hierarchy shared by all heatlab modules."""


class HeatlabError(Exception):
    """Base class for every error raised by heatlab."""


# graph construction
class NonPositiveWeight(HeatlabError, ValueError):
    pass


class SelfLoop(HeatlabError, ValueError):
    pass


class ConflictingDuplicateEdge(HeatlabError, ValueError):
    pass


class DisconnectedGraph(HeatlabError, ValueError):
    pass


class RadiusOrderViolation(HeatlabError, ValueError):
    pass


# generators
class SizeTooSmall(HeatlabError, ValueError):
    pass


class LevelTooLarge(HeatlabError, ValueError):
    pass


# kernels and solvers
class SourceOutsideDomain(HeatlabError, ValueError):
    pass


class TimeMismatch(HeatlabError, ValueError):
    pass


class ShapeMismatch(HeatlabError, ValueError):
    pass


class SingularSystem(HeatlabError, ValueError):
    pass


class OverlappingTerminals(HeatlabError, ValueError):
    pass


class SolverDivergence(HeatlabError, RuntimeError):
    pass


class NonConvergence(HeatlabError, RuntimeError):
    pass


class TruncationViolation(HeatlabError, ValueError):
    """A ball reaches vertices whose neighbourhood was cut off by the generator."""


# scaling tables and verifiers
class OutOfTabulatedRange(HeatlabError, ValueError):
    pass


class InsufficientGrid(HeatlabError, ValueError):
    pass


class NotApplicableBetaPrime(HeatlabError, ValueError):
    pass


class ConfigOrderViolation(HeatlabError, ValueError):
    pass


class CylinderTooSmall(HeatlabError, ValueError):
    pass
