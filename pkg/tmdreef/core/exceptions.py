"""
Exception hierarchy for tmdreef.

Every error carries an exit code so the CLI can map failures to a
category, the same way the API layer maps failures to HTTP statuses.
"""
from pathlib import Path
from typing import Optional


class TmdReefError(Exception):
    """Base class for all tmdreef errors."""

    exit_code: int = 1


class ConfigError(TmdReefError):
    """Invalid, incomplete or inconsistent experiment configuration."""

    exit_code = 2


class InvalidModelError(TmdReefError):
    """Building parameters violate the shear-building invariants."""

    exit_code = 2


class InvalidDesignError(TmdReefError):
    """TMD design does not fit the building it is applied to."""

    exit_code = 2


class InvalidGenomeError(TmdReefError):
    """Genome is outside the feasible box or has non-integral floor genes."""

    exit_code = 2


class NumericalError(TmdReefError):
    """A linear-algebra or integration step failed."""

    exit_code = 3


class SingularSystemError(NumericalError):
    """Dynamic stiffness matrix is singular at a grid frequency."""

    def __init__(self, omega: float, message: Optional[str] = None):
        self.omega = float(omega)
        super().__init__(message or f"Singular system at omega = {self.omega:.6g} rad/s")


class PoleError(NumericalError):
    """TMD transfer function evaluated exactly at an undamped pole."""


class InconclusiveError(NumericalError):
    """Time-domain transient did not decay within the integration horizon."""


class ExportError(TmdReefError):
    """Reading or writing a result file failed."""

    exit_code = 4

    def __init__(self, path: Path, reason: str):
        self.path = Path(path)
        super().__init__(f"{self.path}: {reason}")
