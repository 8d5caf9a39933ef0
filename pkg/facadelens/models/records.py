"""
Corpus record domain models.
"""

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .labels import (
    BuildingStructure,
    CategoryVerdict,
    FireproofClass,
    PropertyType,
    RawPropertyCategory,
    Split,
)


@dataclass
class PropertyRecord:
    """One real-estate property with its target attributes.

    ``ptype`` and ``fireproof`` are derived by the rules service and stay
    ``None`` until the record has passed metadata filtering.
    """

    property_id: str
    construction_year: int | None
    structure: BuildingStructure | None
    category: str | None
    ptype: PropertyType | None = None
    fireproof: FireproofClass | None = None

    @property
    def raw_category(self) -> RawPropertyCategory | None:
        """Whitelist category parsed from the raw text."""
        if self.category is None:
            return None
        return RawPropertyCategory.parse(self.category)

    def to_dict(self) -> dict[str, Any]:
        """Convert to the manifest line layout."""
        result: dict[str, Any] = {
            "property_id": self.property_id,
            "construction_year": self.construction_year,
            "structure": self.structure.value if self.structure else None,
            "category": self.category,
        }
        if self.ptype is not None:
            result["ptype"] = self.ptype.value
        if self.fireproof is not None:
            result["fireproof"] = self.fireproof.value
        return result


@dataclass
class ImageRecord:
    """One facade image belonging to a property."""

    image_id: str
    property_id: str
    path: Path
    phash: int | None = None
    category_verdict: CategoryVerdict | None = None

    def to_dict(self, base_dir: Path | None = None) -> dict[str, Any]:
        """Convert to the manifest line layout, paths relative to ``base_dir``."""
        path = self.path
        if base_dir is not None:
            path = Path(os.path.relpath(Path(path).resolve(), base_dir))
        result: dict[str, Any] = {
            "image_id": self.image_id,
            "property_id": self.property_id,
            "path": path.as_posix(),
        }
        if self.phash is not None:
            result["phash"] = f"{self.phash:016x}"
        if self.category_verdict is not None:
            result["category_verdict"] = self.category_verdict.value
        return result


@dataclass(frozen=True)
class Rejection:
    """Why one property or image was dropped."""

    item_id: str
    reason: str
    detail: str | None = None

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        result: dict[str, Any] = {"item_id": self.item_id, "reason": self.reason}
        if self.detail is not None:
            result["detail"] = self.detail
        return result


@dataclass(frozen=True)
class ManifestDiagnostic:
    """A malformed manifest line."""

    line: int
    message: str
    field: str | None = None

    def __str__(self) -> str:
        if self.field:
            return f"line {self.line}: {self.message} (field '{self.field}')"
        return f"line {self.line}: {self.message}"


@dataclass
class SplitAssignment:
    """Property-level train/test partition."""

    assignments: dict[str, Split]
    split_seed: int
    train_fraction: float = 0.8

    def split_of(self, property_id: str) -> Split:
        """Split of one property; raises KeyError for unknown ids."""
        return self.assignments[property_id]

    def ids(self, split: Split) -> set[str]:
        """All property ids assigned to ``split``."""
        return {pid for pid, s in self.assignments.items() if s is split}

    @property
    def realized_train_fraction(self) -> float:
        """Share of properties that ended up in train."""
        if not self.assignments:
            return 0.0
        return len(self.ids(Split.TRAIN)) / len(self.assignments)


@dataclass
class LabeledImage:
    """An image joined with the labels of its property."""

    image_id: str
    property_id: str
    path: Path
    construction_year: int
    structure: BuildingStructure
    ptype: PropertyType
    fireproof: FireproofClass
    split: Split | None = None

    def to_dict(self, base_dir: Path | None = None) -> dict[str, Any]:
        """Convert to the labeled manifest line layout."""
        path = self.path
        if base_dir is not None:
            path = Path(os.path.relpath(Path(path).resolve(), base_dir))
        result: dict[str, Any] = {
            "image_id": self.image_id,
            "property_id": self.property_id,
            "path": path.as_posix(),
            "construction_year": self.construction_year,
            "structure": self.structure.value,
            "ptype": self.ptype.value,
            "fireproof": self.fireproof.value,
        }
        if self.split is not None:
            result["split"] = self.split.value
        return result


@dataclass
class CorpusStatistics:
    """Label and year distribution of a property set."""

    n_properties: int
    structure_counts: dict[str, int] = field(default_factory=dict)
    ptype_counts: dict[str, int] = field(default_factory=dict)
    fireproof_counts: dict[str, int] = field(default_factory=dict)
    decade_counts: dict[int, int] = field(default_factory=dict)
    share_from_2000: float = 0.0
    share_before_1980: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "n_properties": self.n_properties,
            "structure_counts": self.structure_counts,
            "ptype_counts": self.ptype_counts,
            "fireproof_counts": self.fireproof_counts,
            "decade_counts": {str(k): v for k, v in self.decade_counts.items()},
            "share_from_2000": self.share_from_2000,
            "share_before_1980": self.share_before_1980,
        }


@dataclass
class ManifestContents:
    """Records parsed from one manifest file plus per-line diagnostics."""

    properties: list[PropertyRecord] = field(default_factory=list)
    images: list[ImageRecord] = field(default_factory=list)
    diagnostics: list[ManifestDiagnostic] = field(default_factory=list)
