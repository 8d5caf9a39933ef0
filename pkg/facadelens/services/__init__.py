"""
Business logic services.
"""

from .dedup import DedupResult, DedupService, apply_category_filter, cluster_duplicates
from .ingest import (
    corpus_statistics,
    drop_orphan_images,
    filter_metadata,
    label_images,
    split_properties,
)
from .rules import fireproof_class, is_residential, raw_category_to_property_type

__all__ = [
    "fireproof_class",
    "raw_category_to_property_type",
    "is_residential",
    "filter_metadata",
    "drop_orphan_images",
    "split_properties",
    "label_images",
    "corpus_statistics",
    "cluster_duplicates",
    "apply_category_filter",
    "DedupService",
    "DedupResult",
]
