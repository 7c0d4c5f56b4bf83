"""Exception hierarchy shared by every module of the package."""


class SurfcutError(Exception):
    """Base class; ``exit_code`` is what the command line reports."""

    exit_code = 3


class MapError(SurfcutError, ValueError):
    pass


class NonInvolution(MapError):
    pass


class FixedPointTwin(MapError):
    pass


class PermutationDomainMismatch(MapError):
    pass


class NegativeWeight(MapError):
    pass


class NonCellular(MapError):
    pass


class OddGenusParityForOrientable(MapError):
    pass


class EmptySubgraph(MapError):
    pass


class EmptyGraph(MapError):
    pass


class FaceDegreeTooSmall(MapError):
    pass


class ParseError(SurfcutError):
    exit_code = 2


class NotACutGraph(SurfcutError):
    exit_code = 1


class NotADiskDecomposition(SurfcutError):
    pass


class BudgetExceeded(SurfcutError):
    exit_code = 3


class NonPositiveEpsilon(SurfcutError, ValueError):
    pass


class NonPlanarBrick(SurfcutError):
    pass


class DisconnectedTerminals(SurfcutError):
    pass


class SpannerNotCutting(SurfcutError):
    pass


class HeavyWeightTooSmall(SurfcutError, ValueError):
    pass


class NooseExtractionFailure(SurfcutError):
    pass


class BoundaryTooLarge(SurfcutError):
    exit_code = 3


class GluingMismatch(SurfcutError):
    pass


class WidthCapExceeded(SurfcutError):
    exit_code = 3


class NoCutGraphMap(SurfcutError):
    pass


class InfeasibleParameters(SurfcutError, ValueError):
    pass
