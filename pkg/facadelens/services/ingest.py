"""
Metadata filtering, property-level splitting and dataset assembly.
"""

import hashlib
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import replace

from ..exceptions.manifest import DuplicatePropertyError
from ..models.labels import Split
from ..models.records import (
    CorpusStatistics,
    ImageRecord,
    LabeledImage,
    PropertyRecord,
    Rejection,
    SplitAssignment,
)
from .rules import fireproof_class, is_residential, raw_category_to_property_type

MIN_CONSTRUCTION_YEAR = 1915

# Rejection reasons
MISSING_VALUE = "missing_value"
PRE_1915 = "pre_1915"
NON_RESIDENTIAL = "non_residential"
ORPHAN_IMAGE = "orphan_image"


def filter_metadata(
    records: Iterable[PropertyRecord],
) -> tuple[list[PropertyRecord], list[Rejection]]:
    """Drop unusable records and derive property type and fireproof class.

    Checks run in order (missing value, pre-1915, non-residential) and the
    first failing check is the single reason logged for a drop.
    """
    retained: list[PropertyRecord] = []
    rejections: list[Rejection] = []

    for record in records:
        year, structure, category = (
            record.construction_year,
            record.structure,
            record.category,
        )
        if year is None or structure is None or category is None:
            missing = [
                name
                for name, value in (
                    ("construction_year", year),
                    ("structure", structure),
                    ("category", category),
                )
                if value is None
            ]
            rejections.append(
                Rejection(record.property_id, MISSING_VALUE, ",".join(missing))
            )
            continue

        if year < MIN_CONSTRUCTION_YEAR:
            rejections.append(Rejection(record.property_id, PRE_1915, str(year)))
            continue

        raw_category = record.raw_category
        if raw_category is None or not is_residential(raw_category):
            rejections.append(Rejection(record.property_id, NON_RESIDENTIAL, category))
            continue
        ptype = raw_category_to_property_type(raw_category)

        retained.append(
            replace(record, ptype=ptype, fireproof=fireproof_class(structure, ptype))
        )

    return retained, rejections


def drop_orphan_images(
    images: Iterable[ImageRecord], properties: Iterable[PropertyRecord]
) -> tuple[list[ImageRecord], list[Rejection]]:
    """Keep images whose property survived filtering."""
    known = {p.property_id for p in properties}
    retained: list[ImageRecord] = []
    rejections: list[Rejection] = []
    for image in images:
        if image.property_id in known:
            retained.append(image)
        else:
            rejections.append(Rejection(image.image_id, ORPHAN_IMAGE, image.property_id))
    return retained, rejections


def split_unit(seed: int, property_id: str) -> float:
    """Stable position of a property in [0, 1) for a given seed."""
    digest = hashlib.sha256(f"{seed}:{property_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big") / 2**64


def split_properties(
    records: Sequence[PropertyRecord], seed: int, train_fraction: float = 0.8
) -> SplitAssignment:
    """Assign every property to train or test from a hash of (seed, id).

    Assignments of existing ids never change when records are added.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")

    assignments: dict[str, Split] = {}
    for record in records:
        if record.property_id in assignments:
            raise DuplicatePropertyError(record.property_id)
        unit = split_unit(seed, record.property_id)
        assignments[record.property_id] = Split.TRAIN if unit < train_fraction else Split.TEST

    return SplitAssignment(
        assignments=assignments, split_seed=seed, train_fraction=train_fraction
    )


def label_images(
    images: Iterable[ImageRecord],
    properties: Iterable[PropertyRecord],
    assignment: SplitAssignment | None = None,
    split: Split | None = None,
) -> list[LabeledImage]:
    """Join images with their property's labels, optionally one split only.

    Images of unknown or unlabeled properties are skipped.
    """
    by_id = {p.property_id: p for p in properties}
    labeled: list[LabeledImage] = []
    for image in images:
        record = by_id.get(image.property_id)
        if (
            record is None
            or record.construction_year is None
            or record.structure is None
            or record.ptype is None
            or record.fireproof is None
        ):
            continue
        assigned = assignment.assignments.get(image.property_id) if assignment else None
        if split is not None and assigned is not split:
            continue
        labeled.append(
            LabeledImage(
                image_id=image.image_id,
                property_id=image.property_id,
                path=image.path,
                construction_year=record.construction_year,
                structure=record.structure,
                ptype=record.ptype,
                fireproof=record.fireproof,
                split=assigned,
            )
        )
    return labeled


def corpus_statistics(records: Sequence[PropertyRecord]) -> CorpusStatistics:
    """Label counts, decade histogram and the recent/old year shares."""
    years = [r.construction_year for r in records if r.construction_year is not None]
    n_years = len(years)

    def counts(values: Iterable[object]) -> dict[str, int]:
        counter = Counter(getattr(v, "value", v) for v in values if v is not None)
        return dict(sorted(counter.items()))

    return CorpusStatistics(
        n_properties=len(records),
        structure_counts=counts(r.structure for r in records),
        ptype_counts=counts(r.ptype for r in records),
        fireproof_counts=counts(r.fireproof for r in records),
        decade_counts=dict(sorted(Counter(y // 10 * 10 for y in years).items())),
        share_from_2000=sum(y >= 2000 for y in years) / n_years if n_years else 0.0,
        share_before_1980=sum(y < 1980 for y in years) / n_years if n_years else 0.0,
    )
