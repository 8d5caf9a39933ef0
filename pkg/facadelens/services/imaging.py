"""
Image IO and perceptual hashing.
"""

from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError
from scipy.fft import dctn

from ..exceptions.imaging import ImageDecodeError
from ..models.hashing import PerceptualHash

HASH_INPUT_SIZE = 32
HASH_BLOCK = 8


def load_image(path: Path | str) -> Image.Image:
    """Decode an image file into RGB, raising ImageDecodeError on failure."""
    try:
        with Image.open(path) as image:
            image.load()
            return image.convert("RGB")
    except (OSError, UnidentifiedImageError, ValueError) as e:
        raise ImageDecodeError(f"Cannot decode image {path}: {e}", str(path)) from e


def image_to_array(image: Image.Image, size: int) -> np.ndarray:
    """RGB uint8 array of shape size x size x 3 (bilinear resize if needed)."""
    if image.size != (size, size):
        image = image.resize((size, size), Image.Resampling.BILINEAR)
    return np.asarray(image.convert("RGB"), dtype=np.uint8)


def phash(image: Image.Image | np.ndarray, image_id: str = "") -> PerceptualHash:
    """DCT perceptual hash.

    Luma conversion (0.299 R + 0.587 G + 0.114 B, rounded), bilinear resize to
    32 x 32, unnormalized 2-D type-II DCT, top-left 8 x 8 block. A bit is set
    where the coefficient exceeds the median of the 63 non-DC coefficients,
    scanned row-major with the DC term as the most significant bit.
    """
    if isinstance(image, np.ndarray):
        image = Image.fromarray(np.ascontiguousarray(image))
    if image.width == 0 or image.height == 0:
        raise ImageDecodeError(f"Image '{image_id}' has zero size")

    if image.mode not in ("L", "RGB"):
        image = image.convert("RGB")
    gray = image.convert("L").resize(
        (HASH_INPUT_SIZE, HASH_INPUT_SIZE), Image.Resampling.BILINEAR
    )
    pixels = np.asarray(gray, dtype=np.float64)

    coefficients = dctn(pixels, type=2, norm=None)
    block = coefficients[:HASH_BLOCK, :HASH_BLOCK].flatten()
    median = np.median(block[1:])
    bits = np.packbits(block > median)
    return PerceptualHash(int.from_bytes(bits.tobytes(), "big"), image_id)


def phash_file(path: Path | str, image_id: str = "") -> PerceptualHash:
    """Hash an image file."""
    return phash(load_image(path), image_id)
