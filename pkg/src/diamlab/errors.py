"""Exception types shared across the package.

Plain domain errors (bad argument to a math function, empty point set)
are raised as ValueError; the classes here mark the two conditions the
command line maps to dedicated exit codes.
"""


class ConfigurationError(ValueError):
    """An experiment or distribution configuration that cannot be run."""


class NumericalError(ArithmeticError):
    """A numerical procedure failed to converge or produced non-finite values."""
