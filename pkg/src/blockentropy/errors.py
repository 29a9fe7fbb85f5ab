"""Exception hierarchy.

Every error is a ``ValueError`` so callers that only care about bad input
can catch that; the CLI maps the classes below onto exit codes.
"""


class BlockEntropyError(ValueError):
    """Base class for all errors raised by this package."""


class NonHermitianInput(BlockEntropyError):
    pass


class InvalidDistribution(BlockEntropyError):
    pass


class InvalidState(BlockEntropyError):
    pass


class DimensionMismatch(BlockEntropyError):
    pass


class NotBlockDiagonal(BlockEntropyError):
    pass


class InvalidBlockState(BlockEntropyError):
    pass


class DecompositionMismatch(BlockEntropyError):
    pass


class NotAMember(BlockEntropyError):
    pass


class InfeasibleDirection(BlockEntropyError):
    pass


class SpecParseError(BlockEntropyError):
    """Malformed constraint-spec text (not JSON, wrong top-level shape)."""


class SpecValidationError(BlockEntropyError):
    """Well-formed spec whose content is invalid.

    ``path`` names the offending field, e.g. ``conditionals[1].matrices[0]``.
    """

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")
