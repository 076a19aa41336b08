"""Exception taxonomy shared across the package.

Two broad families matter for callers: parameter/input problems
(:class:`ParameterError` and its subclasses) and numerical breakdowns
(:class:`NumericalFailureError` and friends). The command-line layer maps
the first family to exit code 2 and the second to exit code 3.
"""


class LowRankError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(LowRankError, ValueError):
    """An argument, flag, or configuration value is invalid."""


class ShapeError(ParameterError):
    """Operands have missing, extra, or incompatible dimensions."""


class ContractError(LowRankError):
    """A state arose that the mathematics rules out.

    Seeing this means numerics broke down or an internal invariant was
    violated, not that the caller passed a bad value.
    """


class NumericalFailureError(LowRankError):
    """An iterative routine failed to converge within its iteration cap."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class RankDeficiencyError(NumericalFailureError):
    """A matrix handed to the orthonormalization step has numerically
    dependent columns."""

    def __init__(self, detected_rank, column):
        super().__init__(
            f"rank deficiency detected: column {column} is numerically "
            f"dependent on its predecessors (detected rank {detected_rank})"
        )
        self.detected_rank = detected_rank
        self.column = column


class NpyFormatError(ParameterError):
    """An NPY file could not be parsed."""


class NpyBadMagicError(NpyFormatError):
    """The file does not start with the NPY magic string."""


class NpyVersionError(NpyFormatError):
    """The file uses an NPY format version other than 1.0."""


class NpyHeaderError(NpyFormatError):
    """The header is not the expected Python-literal dictionary."""


class NpyUnsupportedDtypeError(NpyFormatError):
    """The array dtype is outside the supported little-endian float subset."""


class NpyTruncatedError(NpyFormatError):
    """The file ends before the header or payload is complete."""


class NpyShapeError(NpyFormatError):
    """The declared shape is unusable or disagrees with the payload size."""


class ManifestError(ParameterError):
    """A model manifest or report document violates its JSON schema."""
