"""Exception and warning types shared across the package."""


class BMCostError(Exception):
    """Base class for numerical failures raised by this package."""


class GridError(BMCostError, ValueError):
    pass


class NonFiniteError(GridError):
    pass


class GrowthError(BMCostError, ValueError):
    """Declared growth class or envelope inconsistent with the samples."""


class TailError(BMCostError):
    """Analytic tail correction too large relative to the result."""


class QuadratureError(BMCostError):
    pass


class PreconditionError(BMCostError, ValueError):
    pass


class ConstructionError(BMCostError):
    pass


class TruncationError(BMCostError):
    pass


class GramError(BMCostError):
    pass


class RegimeWarning(UserWarning):
    """Parameters outside the range where the construction is proven."""


class DegenerateWarning(UserWarning):
    pass


class LogScaleWarning(UserWarning):
    """A value overflowed double range; use the log-scale evaluator."""
