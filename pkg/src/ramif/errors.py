"""Exception types shared across the package."""


class RamifError(Exception):
    """Base class for all library errors."""


class PrecisionError(RamifError):
    """A truncated series lost its exact pole part."""


class NotAUnitError(RamifError):
    pass


class CharacteristicError(RamifError):
    """Operation needs positive characteristic (or a matching one)."""


class MembershipError(RamifError):
    """Input lies outside the filtration step an operation requires."""


class NonAdditiveError(RamifError):
    """Fiber element is not a sum of additive shapes."""


class WittExactnessError(RamifError):
    pass


class SchemaError(RamifError):
    """Malformed or inconsistent JSON document."""
