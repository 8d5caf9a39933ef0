"""
Factory functions for creating service and use case instances.
"""

from .config import config
from .external.category_filter import CategoryFilter, HeuristicCategoryFilter
from .models.network import MultiTaskModel
from .repositories.base import ManifestRepository
from .repositories.checkpoint import CheckpointRepository
from .repositories.jsonl_manifest import JsonlManifestRepository
from .services.dedup import DEFAULT_THRESHOLD, DedupService
from .services.training import build_model
from .use_cases import stages
from .use_cases.pipeline import RunPipelineUseCase


def create_manifest_repository() -> ManifestRepository:
    """Create ManifestRepository instance."""
    return JsonlManifestRepository()


def create_checkpoint_repository() -> CheckpointRepository:
    """Create CheckpointRepository instance."""
    return CheckpointRepository()


def create_category_filter() -> CategoryFilter:
    """Create the default image category filter."""
    return HeuristicCategoryFilter()


def create_dedup_service(threshold: int = DEFAULT_THRESHOLD) -> DedupService:
    """Create DedupService with dependencies injected."""
    return DedupService(category_filter=create_category_filter(), threshold=threshold)


def create_model(seed: int, image_size: int = 128) -> MultiTaskModel:
    """Create a freshly initialized network."""
    return build_model(seed, image_size)


def create_pipeline(dedup_threshold: int = DEFAULT_THRESHOLD) -> RunPipelineUseCase:
    """Create RunPipelineUseCase with every stage wired up."""
    # Validate process-level configuration before doing any work
    config.validate_and_raise()

    repository = create_manifest_repository()
    checkpoints = create_checkpoint_repository()
    return RunPipelineUseCase(
        repository=repository,
        synthesize=stages.SynthesizeCorpusUseCase(repository),
        ingest=stages.IngestUseCase(repository),
        dedup=stages.DedupUseCase(repository, create_dedup_service(dedup_threshold)),
        split=stages.SplitUseCase(repository),
        train=stages.TrainUseCase(repository, checkpoints, create_model),
        evaluate=stages.EvaluateUseCase(repository, checkpoints),
    )
