"""Exception types shared across the package.

Domain errors all derive from FissionError so the CLI can map them to a
single exit code; ZeroDivisionError is used directly for division by zero,
matching normal Python arithmetic behaviour.
"""


class FissionError(ValueError):
    """Base class for domain errors raised by this package."""


class ParseError(FissionError):
    """Input text does not conform to the factor/type/class grammar."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class NonPositiveExponent(FissionError):
    """An exponential factor contained a term of exponent <= 0."""


class RamMismatch(FissionError):
    """Pullback order is not a multiple of every ramification present."""


class DuplicateOrbit(FissionError):
    """Two entries of a pointed irregular type lie in the same Galois orbit."""


class NotCompatible(FissionError):
    """A pointed irregular type is not compatible where compatibility is required."""


class MalformedLevelDatum(FissionError):
    """Rationals violate the strictly-increasing-denominator level conditions."""


class DomainMismatch(FissionError):
    """A coefficient map is not defined on exactly the admissible vertices."""


class NotRealisation(FissionError):
    """A coefficient map violates the realisation conditions of its tree."""


class ShapeMismatch(FissionError):
    """A group element does not match the shape of the object it should act on."""


class BoundsTooLarge(FissionError):
    """A census/enumeration request exceeds the configured resource cap."""
