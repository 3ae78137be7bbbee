"""
errors.py — Exception hierarchy for the ringfit engine.

Every failure the engine reports derives from RingFitError, so callers
(the CLI in particular) can catch one type and map it to an exit code.
"""

from typing import Optional


class RingFitError(Exception):
    """Base class for all engine errors."""


# ═══════════════════════════════════════════════════════════════
#  PARAMETERS
# ═══════════════════════════════════════════════════════════════

class InvalidParamsError(RingFitError, ValueError):
    """A parameter violates its invariant.

    Args:
        name: parameter name (e.g. 'epsilon', 'gamma_c')
        message: description of the violation
    """

    def __init__(self, name: str, message: str):
        super().__init__(f"{name}: {message}")
        self.name = name


class ZeroDetuningError(InvalidParamsError):
    """The far-detuned approximation was requested at δ = 0."""

    def __init__(self):
        super().__init__('delta_atom', 'light shift per photon is undefined at zero detuning')


class NonPositiveCouplingError(InvalidParamsError):
    def __init__(self, value: float):
        super().__init__('coupling', f'effective single-atom coupling must be > 0, got {value!r}')


class GridError(RingFitError, ValueError):
    """Detuning grid (or spectrum axis) is empty or not strictly increasing."""

    def __init__(self, reason: str, message: str):
        super().__init__(message)
        self.reason = reason    # 'empty' | 'non_monotone'


# ═══════════════════════════════════════════════════════════════
#  FITTING / ANALYSIS
# ═══════════════════════════════════════════════════════════════

class FitError(RingFitError):
    """The fitter could not be run on the given input."""


class InsufficientPointsError(FitError):
    def __init__(self, n_points: int, n_free: int):
        super().__init__(
            f"spectrum has {n_points} points, need at least {n_free} "
            f"(number of free parameters)"
        )
        self.n_points = n_points
        self.n_free = n_free


class DegenerateAbscissaError(RingFitError, ValueError):
    """Regression needs at least two distinct atom numbers."""


class ZeroDenominatorError(RingFitError, ValueError):
    """N·|g_δ|·ξ_rad vanishes, so ξ_ax cannot be inferred."""


# ═══════════════════════════════════════════════════════════════
#  FILE FORMATS
# ═══════════════════════════════════════════════════════════════

class SpectrumParseError(RingFitError):
    """Malformed spectrum CSV.

    Args:
        path: file being read
        line: 1-based line number of the offending line (None if not line-specific)
        message: what went wrong
    """

    def __init__(self, path: str, line: Optional[int], message: str):
        where = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{where}: {message}")
        self.path = str(path)
        self.line = line


class ConfigError(RingFitError):
    """Config file cannot be parsed."""

    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location


class SchemaViolation(ConfigError):
    """A config or results key is unknown, missing, or out of range."""

    def __init__(self, key: str, message: str):
        super().__init__(key, message)
        self.key = key
