"""Exception types. Each maps onto one CLI exit code."""


class SrvregError(Exception):
    exit_code = 1


class CurveError(SrvregError, ValueError):
    """Invalid curve data (bad samples, degenerate segments, malformed files)."""

    exit_code = 2


class ConfigError(SrvregError, ValueError):
    """Inconsistent scheme or command configuration."""

    exit_code = 4


class NumericalError(SrvregError, ArithmeticError):
    """A numerical invariant was violated (e.g. a backtracking cycle)."""

    exit_code = 3


class DegenerateDifferenceWarning(RuntimeWarning):
    """A finite difference of a curve vanished; the forcing term was set to zero."""
