"""Exception types shared across the package."""


class PlantedRank1Error(Exception):
    """Base class for all package-specific errors."""


class ShapeError(PlantedRank1Error, ValueError):
    """Invalid ambient shape (m, n out of range, or a malformed matrix)."""


class SpecError(PlantedRank1Error, ValueError):
    """Invalid plant specification (s, R) for the given ambient shape."""


class ZeroInverseError(PlantedRank1Error, ZeroDivisionError):
    """Attempted modular inverse of 0 mod p."""


class CapacityError(PlantedRank1Error, ValueError):
    """More pairwise independent vectors requested than the field admits."""


class PreconditionError(PlantedRank1Error, ValueError):
    """A case was submitted outside the regime an operation supports."""


class RankDeficientError(PlantedRank1Error, ValueError):
    """Numerical rank fell below the rank required by the caller."""


class DegenerateInputError(PlantedRank1Error, ValueError):
    """Input carries no usable signal (e.g. an all-zero basis)."""


class LengthMismatchError(PlantedRank1Error, ValueError):
    """Matching requested against fewer candidates than targets."""


class SchemaError(PlantedRank1Error, ValueError):
    """Malformed certificate or CSV contents."""


class BoundError(PlantedRank1Error, ValueError):
    """Requested rank exceeds what a construction or method supports."""


class ModeError(PlantedRank1Error, ValueError):
    """Invalid tensor mode subset for a flattening."""


class RankError(PlantedRank1Error, ValueError):
    """Observed numerical rank disagrees with the requested rank."""


class SymmetryError(PlantedRank1Error, ValueError):
    """Tensor is not symmetric under mode permutations."""
