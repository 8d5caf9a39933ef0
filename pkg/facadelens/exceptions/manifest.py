"""
Manifest and dataset related exceptions.
"""

from .base import FacadeLensException


class ManifestException(FacadeLensException):
    """Base exception for manifest operations."""

    pass


class ManifestError(ManifestException):
    """Exception raised when a manifest file cannot be read or parsed."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        super().__init__(message, "MANIFEST_ERROR")
        self.path = path
        self.line = line


class DuplicatePropertyError(ManifestException):
    """Exception raised when a property id occurs more than once."""

    def __init__(self, property_id: str):
        super().__init__(
            f"Duplicate property_id: {property_id}", "DUPLICATE_PROPERTY"
        )
        self.property_id = property_id
