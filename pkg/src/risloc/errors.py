"""Exception taxonomy shared across the package."""


class RislocError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(RislocError, ValueError):
    """An argument violates a documented precondition."""


class SingularGeometryError(RislocError):
    """Coincident points or another geometric singularity."""


class UnreachablePositionError(RislocError):
    """A position excluded by the obstacle scene (no direct or reflected path)."""


class DegenerateGeometryError(RislocError):
    """Bearing geometry does not determine a finite intersection region."""


class NumericFailureError(RislocError):
    """A numeric computation produced an unusable result."""


class TrainingFailureError(RislocError):
    """Network training diverged or could not proceed."""


class ScenarioParseError(RislocError):
    """Scenario file is malformed; carries the offending line number."""

    def __init__(self, message, line_no=None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
