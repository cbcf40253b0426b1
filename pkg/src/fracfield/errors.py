"""Exception hierarchy for fracfield.

Configuration problems (bad texts, bad files, bad parameters) derive from
``ConfigurationError``; failures of the numerics on valid input derive from
``NumericFailure``. The CLI maps the two families to exit codes 2 and 3.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional


class FracFieldError(Exception):
    """Base class for every error raised by the library."""


# ---------------------------------------------------------------------------
# Configuration / parse errors
# ---------------------------------------------------------------------------
class ConfigurationError(FracFieldError, ValueError):
    """Invalid scenario, expression text or parameter."""


class ExprSyntaxError(ConfigurationError):
    """Expression text does not match the grammar."""

    def __init__(self, message: str, offset: int, text: str = "") -> None:
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.text = text


class UnknownIdentifierError(ConfigurationError):
    def __init__(self, name: str, where: str = "") -> None:
        suffix = f" in {where}" if where else ""
        super().__init__(f"unknown identifier '{name}'{suffix}")
        self.name = name


class UnboundVariableError(ConfigurationError):
    def __init__(self, name: str) -> None:
        super().__init__(f"variable '{name}' is not bound")
        self.name = name


class SampleFileError(ConfigurationError):
    """Sample file missing, malformed or inconsistent with the declared space."""

    def __init__(self, path: Path | str, message: str, line: Optional[int] = None) -> None:
        location = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{location}: {message}")
        self.path = Path(path)
        self.line = line


class CurrentMismatchError(ConfigurationError):
    """Current samples cannot be combined (different points, sectors or endpoints)."""


# ---------------------------------------------------------------------------
# Numeric failures
# ---------------------------------------------------------------------------
class NumericFailure(FracFieldError, ArithmeticError):
    """Valid input on which the numerics could not produce a trustworthy value."""


class DomainViolationError(NumericFailure):
    """An operation was applied outside its real domain (log, sqrt, division, power)."""


class SectorError(NumericFailure):
    """A point touches the singular endpoint or lies outside the sector."""


class InterpolationRangeError(NumericFailure):
    """A sampled field was queried outside its sampling grid."""


class ConvergenceError(NumericFailure):
    """An iterative procedure did not reach its tolerance."""

    def __init__(self, message: str, estimate: Optional[float] = None) -> None:
        super().__init__(message)
        self.estimate = estimate


class SingularApproachError(ConvergenceError):
    """The ODE integrator's step size collapsed approaching the singular point t→0⁺."""
