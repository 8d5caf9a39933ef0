"""
Run all stages in order with content-hash stage caching.
"""

from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..config import PipelineConfig
from ..exceptions.base import FacadeLensException
from ..exceptions.evaluation import StageError
from ..infrastructure.cache import StageStampStore, content_hash
from ..logger import logger
from ..repositories.base import ManifestRepository
from ..services.synthgen import SynthSpec
from ..utils.performance import StageTimer
from . import stages

STAGES: tuple[str, ...] = ("synth", "ingest", "dedup", "split", "train", "eval")
RESOLVED_CONFIG = "resolved_config.yaml"
CONFUSION_TASKS: tuple[str, ...] = ("structure", "ptype", "fireproof")


@dataclass
class PipelineResult:
    """Which stages ran and which were already up to date."""

    executed: list[str] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)


@dataclass
class _Stage:
    name: str
    inputs: Callable[[], list[Path]]
    params: dict[str, Any]
    outputs: list[str]
    run: Callable[[Path], Any]


def synth_spec(config: PipelineConfig) -> SynthSpec:
    """Generator parameters of a pipeline configuration."""
    return SynthSpec(
        n_properties=config.n_properties,
        images_per_property=(config.images_per_property_min, config.images_per_property_max),
        year_range=(config.year_min, config.year_max),
        cue_strength=config.cue_strength,
        seed=config.seed,
    )


def _image_paths(repository: ManifestRepository, manifest: Path) -> list[Path]:
    if not manifest.exists():
        return [manifest]
    return [manifest, *(image.path for image in repository.load_manifest(manifest).images)]


def _labeled_paths(repository: ManifestRepository, manifest: Path) -> list[Path]:
    if not manifest.exists():
        return [manifest]
    try:
        labeled = repository.load_labeled(manifest)
    except FacadeLensException:
        # the stage itself reports the broken manifest
        return [manifest]
    return [manifest, *(image.path for image in labeled)]


class RunPipelineUseCase:
    """synth -> ingest -> dedup -> split -> train -> eval.

    A stage is skipped when its stamp matches the digest of its inputs and
    parameters and its outputs exist. Synthesis is skipped entirely when the
    configuration names external manifests.
    """

    def __init__(
        self,
        repository: ManifestRepository,
        synthesize: stages.SynthesizeCorpusUseCase,
        ingest: stages.IngestUseCase,
        dedup: stages.DedupUseCase,
        split: stages.SplitUseCase,
        train: stages.TrainUseCase,
        evaluate: stages.EvaluateUseCase,
        stamps: StageStampStore | None = None,
    ):
        self.repository = repository
        self.synthesize = synthesize
        self.ingest = ingest
        self.dedup = dedup
        self.split = split
        self.train = train
        self.evaluate = evaluate
        self.stamps = stamps or StageStampStore()

    def _stages(self, config: PipelineConfig, progress: bool) -> list[_Stage]:
        d = config.stage_dir
        if config.properties_manifest is not None and config.images_manifest is not None:
            properties_manifest = Path(config.properties_manifest)
            images_manifest = Path(config.images_manifest)
        else:
            properties_manifest = d("synth") / stages.PROPERTIES
            images_manifest = d("synth") / stages.IMAGES

        plan: list[_Stage] = []
        if config.properties_manifest is None:
            plan.append(
                _Stage(
                    "synth",
                    inputs=lambda: [],
                    params={
                        "n_properties": config.n_properties,
                        "images_per_property": [
                            config.images_per_property_min,
                            config.images_per_property_max,
                        ],
                        "year_range": [config.year_min, config.year_max],
                        "cue_strength": config.cue_strength,
                        "seed": config.seed,
                    },
                    outputs=["images", stages.PROPERTIES, stages.IMAGES],
                    run=lambda out: self.synthesize.execute(synth_spec(config), out),
                )
            )

        plan += [
            _Stage(
                "ingest",
                inputs=lambda: [properties_manifest, images_manifest],
                params={},
                outputs=[stages.PROPERTIES, stages.IMAGES, stages.REJECTIONS, stages.CORPUS_STATS],
                run=lambda out: self.ingest.execute(
                    properties_manifest, images_manifest, out
                ),
            ),
            _Stage(
                "dedup",
                inputs=lambda: _image_paths(self.repository, d("ingest") / stages.IMAGES),
                params={"threshold": config.dedup_threshold},
                outputs=[stages.IMAGES, stages.HASHES, stages.REJECTIONS, stages.CLUSTERS],
                run=lambda out: self.dedup.execute(d("ingest") / stages.IMAGES, out),
            ),
            _Stage(
                "split",
                inputs=lambda: [d("ingest") / stages.PROPERTIES, d("dedup") / stages.IMAGES],
                params={"seed": config.seed, "train_fraction": config.train_fraction},
                outputs=[stages.SPLIT, stages.LABELED],
                run=lambda out: self.split.execute(
                    d("ingest") / stages.PROPERTIES,
                    d("dedup") / stages.IMAGES,
                    out,
                    config.seed,
                    config.train_fraction,
                ),
            ),
            _Stage(
                "train",
                inputs=lambda: _labeled_paths(self.repository, d("split") / stages.LABELED),
                params=config.train.to_dict(),
                outputs=[stages.CHECKPOINT, stages.LOSS_TRACE],
                run=lambda out: self.train.execute(
                    d("split") / stages.LABELED,
                    out / stages.CHECKPOINT,
                    config.train,
                    progress,
                ),
            ),
            _Stage(
                "eval",
                inputs=lambda: [
                    d("train") / stages.CHECKPOINT,
                    *_labeled_paths(self.repository, d("split") / stages.LABELED),
                ],
                params={},
                outputs=[stages.REPORT, *(f"confusion_{t}.tsv" for t in CONFUSION_TASKS)],
                run=lambda out: self.evaluate.execute(
                    d("train") / stages.CHECKPOINT,
                    d("split") / stages.LABELED,
                    out / stages.REPORT,
                ),
            ),
        ]
        return plan

    def execute(
        self,
        config: PipelineConfig,
        only: Iterable[str] | None = None,
        force: bool = False,
        progress: bool = False,
    ) -> PipelineResult:
        """Run the stages (all, or those named in ``only``) in order."""
        config.validate_and_raise()
        selected = set(only) if only is not None else set(STAGES)
        unknown = selected - set(STAGES)
        if unknown:
            raise StageError(f"Unknown stage(s): {', '.join(sorted(unknown))}")

        result = PipelineResult()
        timer = StageTimer()
        for stage in self._stages(config, progress):
            if stage.name not in selected:
                continue
            out_dir = config.stage_dir(stage.name)
            digest = content_hash(stage.inputs(), stage.params)
            if not force and self.stamps.is_fresh(out_dir, digest):
                logger.log_stage_skip(stage.name)
                result.skipped.append(stage.name)
                continue

            logger.log_stage_start(stage.name, str(out_dir))
            self.stamps.delete(out_dir)
            timer.start(stage.name)
            try:
                stage.run(out_dir)
            except FacadeLensException:
                raise
            except Exception as e:
                raise StageError(f"Stage '{stage.name}' failed: {e}", stage.name) from e
            finally:
                timer.stop(stage.name)

            config.write(out_dir)
            self.stamps.set(out_dir, stage.name, digest, [*stage.outputs, RESOLVED_CONFIG])
            logger.log_stage_done(stage.name)
            result.executed.append(stage.name)

        if timer.durations:
            logger.info(f"Stage timings: {timer.summary()}")
        return result
