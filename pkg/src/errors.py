"""Exception hierarchy shared by the library and the CLI."""

from pathlib import Path
from typing import Optional


class LocalDBNError(Exception):
    """Base exception for localdbn errors."""

    exit_code = 1


class InputError(LocalDBNError, ValueError):
    """Raised for bad user input: shapes, flags, files."""

    exit_code = 2


class DimensionError(InputError):
    """Raised when matrix shapes do not conform."""

    pass


class InfeasibleSpecError(InputError):
    """Raised when a graph generator configuration cannot be satisfied."""

    pass


class UndefinedMetricError(InputError):
    """Raised when a metric is undefined for the given truth graph."""

    pass


class MalformedCSVError(InputError):
    """Raised when a CSV file has a row of the wrong arity or a bad value."""

    def __init__(self, path: Path, line: int, message: str):
        self.path = Path(path)
        self.line = line
        super().__init__(f"{self.path}:{line}: {message}")


class NumericalError(LocalDBNError, ArithmeticError):
    """Base exception for numerical failures."""

    exit_code = 3


class SingularMatrixError(NumericalError):
    """Raised when an LU pivot falls below the singularity threshold."""

    def __init__(self, message: str, pivot_index: Optional[int] = None):
        self.pivot_index = pivot_index
        super().__init__(message)


class LogDomainError(NumericalError):
    """Raised when the log of a non-positive scalar is requested."""

    pass


class NonFiniteError(NumericalError):
    """Raised when a value or gradient contains NaN or infinity."""

    pass


class UnstableSystemError(NumericalError):
    """Raised when a simulated system diverges."""

    def __init__(self, message: str, spectral_radius: float):
        self.spectral_radius = spectral_radius
        super().__init__(message)
