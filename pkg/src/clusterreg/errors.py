"""Exception hierarchy shared across the package."""


class ClusterRegError(Exception):
    """Base class for all clusterreg errors."""


class DegenerateInput(ClusterRegError):
    """Input point set cannot be processed (e.g. all points coincide)."""


class DimensionMismatch(ClusterRegError):
    """Operands have incompatible spatial dimensions."""


class InvalidK(ClusterRegError):
    """Requested cluster count is outside [1, P]."""


class SingularSystem(ClusterRegError):
    """A linear system could not be solved even after jittering."""


class UnsupportedKernel(ClusterRegError):
    """Operation is only defined for a specific kernel family."""


class NumericalUnderflow(ClusterRegError):
    """A computation underflowed beyond recovery."""


class EmptyCorrespondence(ClusterRegError):
    """No point pairs available for metric evaluation."""


class ParseError(ClusterRegError):
    """A point file failed to parse.

    Carries the 1-based line number where parsing failed (0 if unknown).
    """

    def __init__(self, message, line=0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


class MixedDimensions(ParseError):
    """Rows of a point file disagree on coordinate count."""


class UnsupportedFormat(ClusterRegError):
    """File format not supported (e.g. binary PLY)."""


class UnsupportedDimension(ClusterRegError):
    """Format cannot represent the point dimension (e.g. 2D points as PLY)."""


class IoError(ClusterRegError):
    """Underlying file I/O failed."""
