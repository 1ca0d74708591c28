"""
Exception types raised across the camcurate package.

Every error derives from CamCurateError and from the builtin exception a
caller would naturally catch (ValueError for bad inputs, RuntimeError for
failed estimation), so both `except CamCurateError` and
`except ValueError` work.
"""

from typing import Optional


class CamCurateError(Exception):
    """Base class for all camcurate errors."""


# =============================================================================
# TRAJECTORY INPUT
# =============================================================================

class TrajectoryError(CamCurateError, ValueError):
    """A trajectory file or trajectory object is invalid."""


class TrajectoryParseError(TrajectoryError):
    """A pose file line could not be parsed."""

    def __init__(self, path: str, line_no: int, message: str):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{self.path}:{line_no}: {message}")


class DuplicateFrameError(TrajectoryError):
    """Two poses in one trajectory share a frame index."""


class TrajectoryTooShortError(TrajectoryError):
    """An operation needs at least two poses."""


class InvalidRotationError(TrajectoryError):
    """A rotation matrix is not orthonormal with determinant +1."""


class DegenerateQuaternionError(CamCurateError, ValueError):
    """A quaternion has zero (or non-finite) norm."""


# =============================================================================
# ESTIMATION
# =============================================================================

class DegenerateConfigurationError(CamCurateError, ValueError):
    """Point geometry does not determine a unique transform."""


class RobustFitError(CamCurateError, RuntimeError):
    """RANSAC found no model supported by at least three inliers."""


class UndefinedRatioError(CamCurateError, ValueError):
    """A ratio metric has a zero denominator."""


class DimensionMismatchError(CamCurateError, ValueError):
    """Operands do not share a dimension or length."""


class OutOfRangeError(CamCurateError, ValueError):
    """A scalar or coordinate lies outside its admissible range."""


class ContractError(CamCurateError, ValueError):
    """A caller violated an operation's documented precondition."""


# =============================================================================
# PIPELINE
# =============================================================================

class ConfigError(CamCurateError, ValueError):
    """A configuration file or value is missing or invalid."""


class DataErrorRateExceeded(CamCurateError, RuntimeError):
    """Too many corpus entries failed during one pipeline stage."""

    def __init__(self, stage: str, rate: float, threshold: float, detail: Optional[str] = None):
        self.stage = stage
        self.rate = rate
        self.threshold = threshold
        message = (
            f"{stage}: {rate:.1%} of entries failed "
            f"(limit {threshold:.1%})"
        )
        if detail:
            message += f" - {detail}"
        super().__init__(message)
