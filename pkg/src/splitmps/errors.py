"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Invalid physical or configuration parameter (CLI exit code 1)."""


class DimensionError(ValueError):
    """Tensor leg extents or bipartitions are inconsistent."""


class NumericalError(RuntimeError):
    """Numerical failure during a computation (CLI exit code 2)."""
