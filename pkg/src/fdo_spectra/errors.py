"""Exception types shared across the package."""


class FdoError(Exception):
    """Base class for all package errors."""


class ParameterError(FdoError, ValueError):
    """An argument violates an operation's precondition."""


class EdgeError(ParameterError):
    """Spectral parameter at or beyond the continuous-spectrum edge lambda = 2."""


class SymbolOverflowError(FdoError, OverflowError):
    """A hyperbolic symbol argument exceeds the floating-point range."""


class GridResolutionError(ParameterError):
    """A grid cannot represent the Fourier symbol at the requested scale."""


class TailError(ParameterError):
    """Sampled data does not decay enough at the grid boundary."""


class NumericError(FdoError, RuntimeError):
    """A numerical routine (eigensolve, quadrature, bracketing) failed."""


class ConfigError(ParameterError):
    """An experiment configuration file is malformed or inconsistent."""
