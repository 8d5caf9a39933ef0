"""
Image decoding related exceptions.
"""

from .base import FacadeLensException


class ImageDecodeError(FacadeLensException):
    """Exception raised when an image file cannot be decoded."""

    def __init__(self, message: str, path: str | None = None):
        super().__init__(message, "IMAGE_DECODE_ERROR")
        self.path = path
