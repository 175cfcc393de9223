"""Error taxonomy shared across the package.

The CLI maps these onto its exit-code contract (see cli.main):
config/precondition problems -> 2, capacity -> 3, numerical -> 4.
"""


class BerrylabError(Exception):
    """Base class for package errors."""


class ConfigError(BerrylabError):
    """Invalid parameter combination or violated precondition."""


class CapacityError(BerrylabError):
    """Request exceeds the dense-matrix or precision budget."""


class NumericalError(BerrylabError):
    """Numerical failure: non-convergence, refinement needed, ..."""


class DegeneracyError(NumericalError):
    """Ground space is (numerically) degenerate where non-degeneracy is required."""
