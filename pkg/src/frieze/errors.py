"""Exception types shared across the package."""

from __future__ import annotations


class FriezeError(Exception):
    """Base class for all errors raised by this package."""


class InvalidQuiddity(FriezeError):
    """A quiddity cycle does not come from a polygon triangulation.

    ``chord`` is the first chord ``(i, j)`` at which the check failed, or
    ``None`` when the failure happened during ear removal.
    """

    def __init__(self, message: str, chord: tuple[int, int] | None = None):
        super().__init__(message)
        self.chord = chord


class NonIntegralValue(FriezeError):
    """A strict-mode computation produced a value that is not an integer."""


class MalformedGrid(FriezeError):
    pass


class UnsupportedTopology(FriezeError):
    pass


class BoundaryEdgeNotFlippable(FriezeError):
    pass


class InvalidState(FriezeError):
    pass


class UndefinedShortDiagonal(FriezeError):
    pass


class NotUnitaryInput(FriezeError):
    pass


class NotABridgingEdge(FriezeError):
    pass


class StructuralAssumptionFailed(FriezeError):
    """The structural solver could not find a unit bridging arc.

    Friezes on a pair of pants are unitary, so this signals a bug and is
    never swallowed.
    """


class WindingBoundTooSmall(FriezeError):
    pass


class HypothesesNotMet(FriezeError):
    def __init__(self, message: str, violated: str):
        super().__init__(message)
        self.violated = violated
