"""
Repository interfaces and implementations.
"""

from .base import ManifestRepository
from .checkpoint import Checkpoint, CheckpointRepository
from .jsonl_manifest import JsonlManifestRepository

__all__ = [
    "ManifestRepository",
    "JsonlManifestRepository",
    "Checkpoint",
    "CheckpointRepository",
]
