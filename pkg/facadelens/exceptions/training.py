"""
Model, loss and training related exceptions.
"""

from .base import FacadeLensException


class TrainingException(FacadeLensException):
    """Base exception for model and training operations."""

    pass


class LossInputError(TrainingException):
    """Raised when loss inputs are negative or non-finite."""

    def __init__(self, message: str):
        super().__init__(message, "LOSS_INPUT_ERROR")


class ShapeMismatchError(TrainingException):
    """Raised when an input batch does not have the expected shape."""

    def __init__(self, message: str, shape: tuple[int, ...] | None = None):
        super().__init__(message, "SHAPE_MISMATCH")
        self.shape = shape


class TrainingError(TrainingException):
    """Raised when training cannot start or continue."""

    def __init__(self, message: str, error_code: str = "TRAINING_ERROR"):
        super().__init__(message, error_code)


class NonFiniteLossError(TrainingError):
    """Raised when the combined loss becomes NaN or infinite."""

    def __init__(self, epoch: int, batch: int, value: float):
        super().__init__(
            f"Non-finite loss {value} at epoch {epoch}, batch {batch}",
            "NON_FINITE_LOSS",
        )
        self.epoch = epoch
        self.batch = batch
        self.value = value


class CheckpointError(TrainingException):
    """Raised when a checkpoint cannot be written or read."""

    def __init__(self, message: str, path: str | None = None):
        super().__init__(message, "CHECKPOINT_ERROR")
        self.path = path
