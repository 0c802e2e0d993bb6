"""Exception hierarchy shared across the package."""


class RainbowTuranError(Exception):
    """Base class for every error raised by this package."""


class ParseError(RainbowTuranError):
    pass


class ImproperColouring(RainbowTuranError):
    def __init__(self, first, second, colour):
        self.first = first
        self.second = second
        self.colour = colour
        super().__init__(f"edges {first} and {second} share a vertex and colour {colour}")


class DuplicateEdge(RainbowTuranError):
    pass


class InvalidVertex(RainbowTuranError):
    pass


class OddCycle(RainbowTuranError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__(f"graph is not bipartite; odd cycle {self.cycle}")


class Disconnected(RainbowTuranError):
    pass


class DimensionTooLarge(RainbowTuranError):
    pass


class BudgetExceeded(RainbowTuranError):
    def __init__(self, message, partial=None):
        self.partial = partial
        super().__init__(message)


class ThresholdUnreachable(RainbowTuranError):
    pass


class RetriesExhausted(RainbowTuranError):
    pass


class PreconditionViolated(RainbowTuranError):
    pass


class DegreeTooSmall(PreconditionViolated):
    pass


class ViolationFound(RainbowTuranError):
    pass


class IsolatedVertex(RainbowTuranError):
    pass


class TooLarge(RainbowTuranError):
    pass


class EigensolverFailure(RainbowTuranError):
    pass


class BoundViolated(RainbowTuranError):
    pass


class NoWalk(RainbowTuranError):
    pass


class RoundsExhausted(RainbowTuranError):
    def __init__(self, message, bad_fraction=None):
        self.bad_fraction = bad_fraction
        super().__init__(message)


class IterationCapExceeded(RainbowTuranError):
    pass


class NoGoodPair(RainbowTuranError):
    pass


class NoCliqueOfGoodPairs(RainbowTuranError):
    pass


class SpecError(RainbowTuranError):
    pass


class HeuristicInconclusive(UserWarning):
    """Warning: a heuristic search found no violation but cannot certify."""
