"""Exception types shared across the package."""


class StructureError(ValueError):
    """The coefficient matrix lacks the structure an operation requires
    (e.g. no invertible R x R submatrix)."""


class BudgetError(RuntimeError):
    """A search or memory budget was exhausted before the operation could
    complete.  The message carries a diagnostic (what to shrink or raise)."""


class ConsistencyError(RuntimeError):
    """Two independent computation routes disagreed beyond tolerance.
    This always indicates a bug, never a user error."""


class UnsupportedConfigurationError(ValueError):
    """The requested configuration is documented as out of scope
    (e.g. quadrature for systems of three or more equations)."""
