"""
Perceptual hash and duplicate cluster models.
"""

from dataclasses import dataclass, field
from typing import Any

HASH_BITS = 64


@dataclass(frozen=True)
class PerceptualHash:
    """64-bit DCT hash of one image; bit 63 is the top-left coefficient."""

    bits: int
    source_image: str = ""

    def __post_init__(self):
        if not 0 <= self.bits < 1 << HASH_BITS:
            raise ValueError(f"hash does not fit in {HASH_BITS} bits: {self.bits}")

    @property
    def hex(self) -> str:
        return f"{self.bits:016x}"

    def distance(self, other: "PerceptualHash") -> int:
        """Hamming distance in bits."""
        return hamming_distance(self.bits, other.bits)

    def __sub__(self, other: "PerceptualHash") -> int:
        return self.distance(other)

    @classmethod
    def from_hex(cls, text: str, source_image: str = "") -> "PerceptualHash":
        """Parse 16 hex digits."""
        return cls(int(text, 16), source_image)


@dataclass
class DuplicateCluster:
    """Images linked by chains of near-duplicate pairs."""

    representative: str
    members: set[str] = field(default_factory=set)
    max_internal_distance: int = 0

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "representative": self.representative,
            "members": sorted(self.members),
            "max_internal_distance": self.max_internal_distance,
        }


def hamming_distance(a: int, b: int) -> int:
    """Number of differing bits between two hash values."""
    return (a ^ b).bit_count()
