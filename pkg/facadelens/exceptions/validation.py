"""
Validation related exceptions.
"""

from .base import FacadeLensException


class ValidationException(FacadeLensException):
    """Base exception for validation errors."""

    pass


class ConfigurationError(ValidationException):
    """Exception raised when configuration validation fails."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message, "CONFIGURATION_ERROR")
        self.field = field


class NonResidentialCategoryError(ValidationException):
    """Raised when a raw listing category is outside the residential whitelist."""

    def __init__(self, category: str):
        super().__init__(
            f"Category '{category}' is not a residential category",
            "NON_RESIDENTIAL",
        )
        self.category = category
