"""
Base repository interfaces.
"""

from abc import ABC, abstractmethod
from collections.abc import Iterable
from pathlib import Path

from ..models.hashing import DuplicateCluster
from ..models.labels import Split
from ..models.records import (
    ImageRecord,
    LabeledImage,
    ManifestContents,
    PropertyRecord,
    Rejection,
    SplitAssignment,
)
from ..models.training import EpochLoss


class ManifestRepository(ABC):
    """Abstract base class for corpus manifest persistence."""

    @abstractmethod
    def load_manifest(self, path: Path) -> ManifestContents:
        """Parse property and/or image records from a manifest file."""
        pass

    @abstractmethod
    def save_properties(self, path: Path, records: Iterable[PropertyRecord]) -> None:
        """Write a property manifest."""
        pass

    @abstractmethod
    def save_images(self, path: Path, images: Iterable[ImageRecord]) -> None:
        """Write an image manifest."""
        pass

    @abstractmethod
    def save_rejections(self, path: Path, rejections: Iterable[Rejection]) -> None:
        """Write a rejection log."""
        pass

    @abstractmethod
    def save_split(self, path: Path, assignment: SplitAssignment) -> None:
        """Write a property-level split."""
        pass

    @abstractmethod
    def load_split(self, path: Path) -> SplitAssignment:
        """Read a property-level split."""
        pass

    @abstractmethod
    def save_hash_cache(self, path: Path, hashes: dict[str, int]) -> None:
        """Write image id -> perceptual hash pairs."""
        pass

    @abstractmethod
    def load_hash_cache(self, path: Path) -> dict[str, int]:
        """Read image id -> perceptual hash pairs."""
        pass

    @abstractmethod
    def save_clusters(self, path: Path, clusters: Iterable[DuplicateCluster]) -> None:
        """Write near-duplicate clusters."""
        pass

    @abstractmethod
    def save_labeled(self, path: Path, images: Iterable[LabeledImage]) -> None:
        """Write images joined with their labels and split."""
        pass

    @abstractmethod
    def load_labeled(self, path: Path, split: Split | None = None) -> list[LabeledImage]:
        """Read a labeled manifest, optionally one split only."""
        pass

    @abstractmethod
    def save_loss_trace(self, path: Path, trace: Iterable[EpochLoss]) -> None:
        """Write per-epoch losses."""
        pass

    @abstractmethod
    def load_loss_trace(self, path: Path) -> list[EpochLoss]:
        """Read per-epoch losses."""
        pass
