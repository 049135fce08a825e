"""Exception hierarchy shared by all matleg modules."""


class MatlegError(Exception):
    """Base class for all library-specific errors."""


class DimensionError(MatlegError, ValueError):
    """Matrix or index-set shapes do not satisfy an operation's preconditions."""


class DomainError(MatlegError, ValueError):
    """Input lies outside the mathematical domain of the requested operation.

    ``value`` carries the offending quantity (a determinant, a power base)
    when one exists.
    """

    def __init__(self, message: str, value: float | None = None):
        super().__init__(message)
        self.value = value


class SingularGradientError(DomainError):
    """Gradient requested at a point where it is singular (typically det = 0)."""


class OffManifoldError(DomainError):
    """Dual argument does not lie on the image manifold of the gradient map.

    ``defect`` is the measured distance from the manifold.
    """

    def __init__(self, message: str, defect: float):
        super().__init__(message, value=defect)
        self.defect = defect


class NotInvertibleError(MatlegError):
    """The requested inverse or dual object does not exist for this family."""


class SamplingError(MatlegError, RuntimeError):
    """Sample generation failed to produce an admissible matrix."""


class ConvergenceError(MatlegError, RuntimeError):
    """Iteration budget exhausted; ``best`` holds the best iterate found."""

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class ParseError(MatlegError, ValueError):
    """Malformed JSON input (matrix, family, problem or configuration)."""
