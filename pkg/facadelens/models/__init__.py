"""
Domain models for FacadeLens.
"""

from .hashing import DuplicateCluster, PerceptualHash, hamming_distance
from .labels import (
    FIREPROOF_ORDER,
    PTYPE_ORDER,
    STRUCTURE_ORDER,
    BuildingStructure,
    CategoryVerdict,
    FireproofClass,
    PropertyType,
    RawPropertyCategory,
    Split,
)
from .records import (
    CorpusStatistics,
    ImageRecord,
    LabeledImage,
    ManifestContents,
    ManifestDiagnostic,
    PropertyRecord,
    Rejection,
    SplitAssignment,
)
from .reports import (
    ClassificationReport,
    EraError,
    EvaluationReport,
    Prediction,
    PropagationReport,
    RegressionReport,
)
from .training import LEARNING_RATE_PRESETS, EpochLoss, TrainConfig

__all__ = [
    "BuildingStructure",
    "CategoryVerdict",
    "FireproofClass",
    "PropertyType",
    "RawPropertyCategory",
    "Split",
    "STRUCTURE_ORDER",
    "PTYPE_ORDER",
    "FIREPROOF_ORDER",
    "PerceptualHash",
    "DuplicateCluster",
    "hamming_distance",
    "PropertyRecord",
    "ImageRecord",
    "LabeledImage",
    "ManifestContents",
    "ManifestDiagnostic",
    "Rejection",
    "SplitAssignment",
    "CorpusStatistics",
    "Prediction",
    "RegressionReport",
    "ClassificationReport",
    "PropagationReport",
    "EraError",
    "EvaluationReport",
    "TrainConfig",
    "EpochLoss",
    "LEARNING_RATE_PRESETS",
]
