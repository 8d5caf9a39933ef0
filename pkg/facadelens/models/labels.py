"""
Label taxonomies used across manifests, the model heads and reports.

Enum values are the exact strings written to manifests.
"""

import re
from enum import Enum


class BuildingStructure(str, Enum):
    """Material bucket of the load-bearing construction."""

    CONCRETE_LIKE = "concrete_like"
    STEEL_LIKE = "steel_like"
    WOODEN_LIKE = "wooden_like"

    @classmethod
    def parse(cls, value: str) -> "BuildingStructure":
        """Parse a manifest label, raising ValueError for unknown strings."""
        return cls(_normalize(value))


class PropertyType(str, Enum):
    """Communal (multi-unit) or non-communal (single-unit) dwelling."""

    COMMUNAL = "communal"
    NON_COMMUNAL = "non_communal"

    @classmethod
    def parse(cls, value: str) -> "PropertyType":
        """Parse a manifest label, raising ValueError for unknown strings."""
        return cls(_normalize(value))


class FireproofClass(str, Enum):
    """Insurance fireproof rating: H non-fireproof, T semi-fireproof, M fireproof."""

    H = "H"
    T = "T"
    M = "M"

    @property
    def description(self) -> str:
        """Human readable meaning of the class."""
        return {
            FireproofClass.H: "non-fireproof",
            FireproofClass.T: "semi-fireproof",
            FireproofClass.M: "fireproof",
        }[self]


class RawPropertyCategory(str, Enum):
    """Listing category as found in source metadata."""

    APARTMENT = "apartment"
    HOUSE = "house"
    SINGLE_FAMILY_HOUSE = "single_family_house"
    TERRACE_HOUSE = "terrace_house"
    TOWNHOUSE = "townhouse"
    SUBLEASE = "sublease"
    DORMITORY = "dormitory"
    OTHER = "other"

    @classmethod
    def parse(cls, value: str) -> "RawPropertyCategory":
        """Map free text onto the whitelist; anything unknown becomes OTHER."""
        try:
            return cls(_normalize(value))
        except ValueError:
            return cls.OTHER


class CategoryVerdict(str, Enum):
    """Image content category used to keep only full-facade photos."""

    ENTIRE_RESIDENTIAL = "entire_residential"
    NO_RESIDENTIAL = "no_residential"
    INSIDE_RESIDENTIAL = "inside_residential"
    OTHER = "other"


class Split(str, Enum):
    """Dataset partition of a property."""

    TRAIN = "train"
    TEST = "test"


# Head output order; index i of a probability row is STRUCTURE_ORDER[i].
STRUCTURE_ORDER: tuple[BuildingStructure, ...] = (
    BuildingStructure.CONCRETE_LIKE,
    BuildingStructure.STEEL_LIKE,
    BuildingStructure.WOODEN_LIKE,
)
PTYPE_ORDER: tuple[PropertyType, ...] = (
    PropertyType.COMMUNAL,
    PropertyType.NON_COMMUNAL,
)
FIREPROOF_ORDER: tuple[FireproofClass, ...] = (
    FireproofClass.H,
    FireproofClass.T,
    FireproofClass.M,
)


def _normalize(value: str) -> str:
    """Lowercase and snake-case a label ("Single-family house" -> single_family_house)."""
    return re.sub(r"[\s\-]+", "_", value.strip()).lower()
