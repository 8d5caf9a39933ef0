"""
Rule-based fireproof mapping and raw category mapping.

The fireproof table has "any property type" rows; they are expanded to both
property types when the module loads so the full domain can be enumerated.
"""

from types import MappingProxyType

from ..exceptions.validation import NonResidentialCategoryError
from ..models.labels import (
    PTYPE_ORDER,
    BuildingStructure,
    FireproofClass,
    PropertyType,
    RawPropertyCategory,
)

# (structure, property type or None for "any") -> class
_FIREPROOF_RULES: tuple[
    tuple[BuildingStructure, PropertyType | None, FireproofClass], ...
] = (
    (BuildingStructure.CONCRETE_LIKE, None, FireproofClass.M),
    (BuildingStructure.STEEL_LIKE, PropertyType.COMMUNAL, FireproofClass.M),
    (BuildingStructure.STEEL_LIKE, PropertyType.NON_COMMUNAL, FireproofClass.T),
    (BuildingStructure.WOODEN_LIKE, None, FireproofClass.H),
)


def _expand_rules() -> dict[tuple[BuildingStructure, PropertyType], FireproofClass]:
    table: dict[tuple[BuildingStructure, PropertyType], FireproofClass] = {}
    for structure, ptype, fireproof in _FIREPROOF_RULES:
        for candidate in PTYPE_ORDER if ptype is None else (ptype,):
            table[(structure, candidate)] = fireproof
    return table


FIREPROOF_TABLE = MappingProxyType(_expand_rules())

CATEGORY_TO_PTYPE = MappingProxyType(
    {
        RawPropertyCategory.APARTMENT: PropertyType.COMMUNAL,
        RawPropertyCategory.DORMITORY: PropertyType.COMMUNAL,
        RawPropertyCategory.SUBLEASE: PropertyType.COMMUNAL,
        RawPropertyCategory.HOUSE: PropertyType.NON_COMMUNAL,
        RawPropertyCategory.SINGLE_FAMILY_HOUSE: PropertyType.NON_COMMUNAL,
        RawPropertyCategory.TERRACE_HOUSE: PropertyType.NON_COMMUNAL,
        RawPropertyCategory.TOWNHOUSE: PropertyType.NON_COMMUNAL,
    }
)

RESIDENTIAL_WHITELIST = frozenset(CATEGORY_TO_PTYPE)


def fireproof_class(structure: BuildingStructure, ptype: PropertyType) -> FireproofClass:
    """Fireproof class of a (structure, property type) pair."""
    return FIREPROOF_TABLE[(structure, ptype)]


def raw_category_to_property_type(
    category: RawPropertyCategory | str,
) -> PropertyType:
    """Communal/non-communal type of a whitelisted listing category.

    Raises NonResidentialCategoryError for anything outside the whitelist.
    """
    parsed = (
        category
        if isinstance(category, RawPropertyCategory)
        else RawPropertyCategory.parse(category)
    )
    if parsed not in RESIDENTIAL_WHITELIST:
        text = category.value if isinstance(category, RawPropertyCategory) else category
        raise NonResidentialCategoryError(text)
    return CATEGORY_TO_PTYPE[parsed]


def is_residential(category: RawPropertyCategory | str) -> bool:
    """Whether a category passes the residential whitelist."""
    if not isinstance(category, RawPropertyCategory):
        category = RawPropertyCategory.parse(category)
    return category in RESIDENTIAL_WHITELIST
