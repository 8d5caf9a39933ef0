"""
Evaluation and pipeline related exceptions.
"""

from .base import FacadeLensException


class EvaluationError(FacadeLensException):
    """Raised when metrics cannot be computed for the given inputs."""

    def __init__(self, message: str):
        super().__init__(message, "EVALUATION_ERROR")


class StageError(FacadeLensException):
    """Raised when a pipeline stage fails."""

    def __init__(self, message: str, stage: str | None = None):
        super().__init__(message, "STAGE_ERROR")
        self.stage = stage
