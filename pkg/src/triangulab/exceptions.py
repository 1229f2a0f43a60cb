"""Exception types shared across the package.

Plain argument validation raises ``ValueError``; the classes below mark
failures that callers may want to distinguish programmatically.
"""


class TriangulabError(Exception):
    """Base class for package-specific failures."""


class QuadratureError(TriangulabError):
    """A numerical integration did not meet its accuracy contract."""


class ConstructionError(TriangulabError):
    """An operator matrix could not be assembled from its kernel."""


class NumericalError(TriangulabError):
    """A dense solver failed or a numerical contract was violated."""


class NearSingularError(NumericalError):
    """A resolvent was requested at a point effectively inside the spectrum."""


class FrequencyRangeError(TriangulabError, ValueError):
    """A frequency exceeded the aliasing guard of the active grid."""


class InsufficientDataError(TriangulabError, ValueError):
    """Not enough samples to run the requested estimator or fit."""
