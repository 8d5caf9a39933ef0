"""
One use case per pipeline stage.

Every stage reads its inputs from files, writes its outputs into one
directory and returns a small summary object.
"""

import json
from dataclasses import dataclass
from pathlib import Path

from ..logger import logger
from ..models.labels import Split
from ..models.records import ImageRecord, LabeledImage, Rejection, SplitAssignment
from ..models.reports import EvaluationReport
from ..models.training import EpochLoss, TrainConfig
from ..repositories.base import ManifestRepository
from ..repositories.checkpoint import Checkpoint, CheckpointRepository
from ..services import ingest
from ..services.dedup import DedupResult, DedupService
from ..services.evaluation import evaluate_run
from ..services.synthgen import SynthCorpus, SynthSpec, generate
from ..services.training import ModelFactory, build_model, train
from ..utils.performance import measure_time

MALFORMED_LINE = "malformed_line"

# File names inside stage directories
PROPERTIES = "properties.jsonl"
IMAGES = "images.jsonl"
REJECTIONS = "rejections.jsonl"
CORPUS_STATS = "corpus_stats.json"
HASHES = "hashes.tsv"
CLUSTERS = "clusters.jsonl"
SPLIT = "split.tsv"
LABELED = "labeled.jsonl"
CHECKPOINT = "model.ckpt"
LOSS_TRACE = "loss_trace.jsonl"
REPORT = "report.jsonl"


class SynthesizeCorpusUseCase:
    """Render a synthetic corpus."""

    def __init__(self, repository: ManifestRepository):
        self.repository = repository

    @measure_time
    def execute(self, spec: SynthSpec, out_dir: Path) -> SynthCorpus:
        return generate(spec, out_dir, self.repository)


@dataclass
class IngestResult:
    n_properties: int
    n_images: int
    rejections: list[Rejection]


class IngestUseCase:
    """Parse manifests, filter metadata and drop orphaned images."""

    def __init__(self, repository: ManifestRepository):
        self.repository = repository

    @measure_time
    def execute(
        self, properties_manifest: Path, images_manifest: Path, out_dir: Path
    ) -> IngestResult:
        rejections: list[Rejection] = []
        manifests = {Path(properties_manifest), Path(images_manifest)}
        properties, images = [], []
        for path in sorted(manifests):
            contents = self.repository.load_manifest(path)
            properties.extend(contents.properties)
            images.extend(contents.images)
            rejections.extend(
                Rejection(f"{path.name}:{d.line}", MALFORMED_LINE, str(d))
                for d in contents.diagnostics
            )

        retained, dropped = ingest.filter_metadata(properties)
        rejections.extend(dropped)
        kept_images, orphans = ingest.drop_orphan_images(images, retained)
        rejections.extend(orphans)

        out_dir = Path(out_dir)
        self.repository.save_properties(out_dir / PROPERTIES, retained)
        self.repository.save_images(out_dir / IMAGES, kept_images)
        self.repository.save_rejections(out_dir / REJECTIONS, rejections)
        stats = ingest.corpus_statistics(retained)
        (out_dir / CORPUS_STATS).write_text(
            json.dumps(stats.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        logger.log_rejections("ingest", rejections)
        return IngestResult(len(retained), len(kept_images), rejections)


class DedupUseCase:
    """Hash, deduplicate and category-filter the ingested images."""

    def __init__(self, repository: ManifestRepository, service: DedupService):
        self.repository = repository
        self.service = service

    @measure_time
    def execute(
        self,
        images_manifest: Path,
        out_dir: Path,
        use_cache: bool = True,
        out_manifest: Path | None = None,
    ) -> DedupResult:
        """Retained images go to ``out_manifest`` (default ``<out_dir>/images.jsonl``);
        hashes, rejections and clusters go to ``out_dir``."""
        out_dir = Path(out_dir)
        out_manifest = Path(out_manifest) if out_manifest else out_dir / IMAGES
        images: list[ImageRecord] = self.repository.load_manifest(images_manifest).images
        cache = self.repository.load_hash_cache(out_dir / HASHES) if use_cache else {}

        result = self.service.dedup_images(images, cache)

        self.repository.save_images(out_manifest, result.retained)
        self.repository.save_hash_cache(out_dir / HASHES, result.hashes)
        self.repository.save_rejections(out_dir / REJECTIONS, result.rejections)
        self.repository.save_clusters(
            out_dir / CLUSTERS, [c for c in result.clusters if len(c.members) > 1]
        )
        logger.log_rejections("dedup", result.rejections)
        return result


class SplitUseCase:
    """Assign properties to train/test and write the labeled manifest."""

    def __init__(self, repository: ManifestRepository):
        self.repository = repository

    @measure_time
    def execute(
        self,
        properties_manifest: Path,
        images_manifest: Path,
        out_dir: Path,
        seed: int,
        train_fraction: float,
    ) -> SplitAssignment:
        properties = self.repository.load_manifest(properties_manifest).properties
        images = self.repository.load_manifest(images_manifest).images

        assignment = ingest.split_properties(properties, seed, train_fraction)
        labeled = ingest.label_images(images, properties, assignment)

        out_dir = Path(out_dir)
        self.repository.save_split(out_dir / SPLIT, assignment)
        self.repository.save_labeled(out_dir / LABELED, labeled)
        n_train = sum(1 for item in labeled if item.split is Split.TRAIN)
        logger.info(
            f"Split {len(assignment.assignments)} properties "
            f"(train fraction {assignment.realized_train_fraction:.3f}); "
            f"{n_train} train / {len(labeled) - n_train} test images"
        )
        return assignment


class TrainUseCase:
    """Train a fresh network on the train split and save it."""

    def __init__(
        self,
        repository: ManifestRepository,
        checkpoints: CheckpointRepository,
        model_factory: ModelFactory = build_model,
    ):
        self.repository = repository
        self.checkpoints = checkpoints
        self.model_factory = model_factory

    @measure_time
    def execute(
        self,
        labeled_manifest: Path,
        checkpoint_path: Path,
        config: TrainConfig,
        progress: bool = False,
    ) -> list[EpochLoss]:
        """Train, then write the checkpoint and a loss trace beside it."""
        samples: list[LabeledImage] = self.repository.load_labeled(
            labeled_manifest, Split.TRAIN
        )
        model = self.model_factory(config.seed, config.image_size)
        result = train(model, samples, config, progress=progress)

        checkpoint_path = Path(checkpoint_path)
        self.checkpoints.save(checkpoint_path, Checkpoint(result.model, config))
        self.repository.save_loss_trace(checkpoint_path.parent / LOSS_TRACE, result.trace)
        return result.trace


class EvaluateUseCase:
    """Evaluate a checkpoint on one split of a labeled manifest."""

    def __init__(self, repository: ManifestRepository, checkpoints: CheckpointRepository):
        self.repository = repository
        self.checkpoints = checkpoints

    @measure_time
    def execute(
        self,
        checkpoint_path: Path,
        labeled_manifest: Path,
        out_path: Path,
        split: Split = Split.TEST,
    ) -> EvaluationReport:
        checkpoint = self.checkpoints.load(checkpoint_path)
        samples = self.repository.load_labeled(labeled_manifest, split)
        return evaluate_run(checkpoint.model, checkpoint.train_config, samples, out_path)
