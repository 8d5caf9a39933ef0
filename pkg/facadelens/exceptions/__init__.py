"""
Custom exceptions for FacadeLens.
"""

from .base import FacadeLensException
from .evaluation import EvaluationError, StageError
from .imaging import ImageDecodeError
from .manifest import DuplicatePropertyError, ManifestError, ManifestException
from .training import (
    CheckpointError,
    LossInputError,
    NonFiniteLossError,
    ShapeMismatchError,
    TrainingError,
    TrainingException,
)
from .validation import (
    ConfigurationError,
    NonResidentialCategoryError,
    ValidationException,
)

__all__ = [
    "FacadeLensException",
    "ValidationException",
    "ConfigurationError",
    "NonResidentialCategoryError",
    "ManifestException",
    "ManifestError",
    "DuplicatePropertyError",
    "ImageDecodeError",
    "TrainingException",
    "LossInputError",
    "ShapeMismatchError",
    "TrainingError",
    "NonFiniteLossError",
    "CheckpointError",
    "EvaluationError",
    "StageError",
]
