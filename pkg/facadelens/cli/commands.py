"""
Subcommand implementations.

Each command resolves the pipeline configuration (file, then explicitly
given flags), wires its dependencies through the factories and runs one use
case. Commands return a process exit status.
"""

import argparse
import json
from pathlib import Path

from ..config import PipelineConfig
from ..exceptions.validation import ConfigurationError
from ..factories import (
    create_checkpoint_repository,
    create_dedup_service,
    create_manifest_repository,
    create_pipeline,
)
from ..logger import logger
from ..models.labels import Split
from ..models.training import LEARNING_RATE_PRESETS
from ..services.evaluation import format_report, read_report
from ..services.training import compare_learning_rates, predict
from ..use_cases import stages
from ..use_cases.pipeline import synth_spec


def resolve_config(args: argparse.Namespace, **overrides: object) -> PipelineConfig:
    """Config file values overridden by the flags that were given."""
    overrides.setdefault("workdir", getattr(args, "workdir", None))
    resolved = PipelineConfig.load(args.config).with_overrides(overrides)
    resolved.validate_and_raise()
    return resolved


def _labeled_manifest(data: Path) -> Path:
    return data / stages.LABELED if data.is_dir() else data


def synth_command(args: argparse.Namespace) -> int:
    """Render a synthetic corpus."""
    config = resolve_config(
        args,
        n_properties=args.n_properties,
        seed=args.seed,
        cue_strength=args.cue_strength,
        images_per_property_min=args.images_min,
        images_per_property_max=args.images_max,
    )
    out_dir = Path(args.out) if args.out else config.stage_dir("synth")
    use_case = stages.SynthesizeCorpusUseCase(create_manifest_repository())
    corpus = use_case.execute(synth_spec(config), out_dir)
    config.write(out_dir)
    logger.info(
        f"Wrote {len(corpus.properties)} properties and {len(corpus.images)} images "
        f"to {out_dir}"
    )
    return 0


def ingest_command(args: argparse.Namespace) -> int:
    """Filter manifests into the ingest stage directory."""
    config = resolve_config(args)
    synth_dir = config.stage_dir("synth")
    properties = Path(args.properties) if args.properties else synth_dir / stages.PROPERTIES
    images = Path(args.images) if args.images else synth_dir / stages.IMAGES
    out_dir = Path(args.out) if args.out else config.stage_dir("ingest")

    result = stages.IngestUseCase(create_manifest_repository()).execute(
        properties, images, out_dir
    )
    config.write(out_dir)
    logger.info(
        f"Kept {result.n_properties} properties and {result.n_images} images; "
        f"{len(result.rejections)} rejected"
    )
    return 0


def dedup_command(args: argparse.Namespace) -> int:
    """Remove unreadable images, near-duplicates and non-facade images."""
    config = resolve_config(args, dedup_threshold=args.threshold)
    manifest = Path(args.images) if args.images else config.stage_dir("ingest") / stages.IMAGES
    out = Path(args.out) if args.out else config.stage_dir("dedup")
    # --out names either the retained-image manifest or its directory
    if out.suffix == ".jsonl":
        out_dir, out_manifest = out.parent, out
    else:
        out_dir, out_manifest = out, out / stages.IMAGES

    use_case = stages.DedupUseCase(
        create_manifest_repository(), create_dedup_service(config.dedup_threshold)
    )
    result = use_case.execute(
        manifest, out_dir, use_cache=not args.no_cache, out_manifest=out_manifest
    )
    config.write(out_dir)
    logger.info(f"Kept {len(result.retained)} images; {len(result.rejections)} rejected")
    return 0


def split_command(args: argparse.Namespace) -> int:
    """Assign properties to train/test."""
    config = resolve_config(args, seed=args.seed, train_fraction=args.train_fraction)
    properties = (
        Path(args.properties)
        if args.properties
        else config.stage_dir("ingest") / stages.PROPERTIES
    )
    images = Path(args.images) if args.images else config.stage_dir("dedup") / stages.IMAGES
    out_dir = Path(args.out) if args.out else config.stage_dir("split")

    stages.SplitUseCase(create_manifest_repository()).execute(
        properties, images, out_dir, config.seed, config.train_fraction
    )
    config.write(out_dir)
    return 0


def _train_overrides(args: argparse.Namespace) -> dict[str, object]:
    return {
        "train.learning_rate": getattr(args, "lr", None),
        "train.epochs": getattr(args, "epochs", None),
        "train.batch_size": getattr(args, "batch_size", None),
        "train.seed": getattr(args, "seed", None),
        "train.device": getattr(args, "device", None),
    }


def train_command(args: argparse.Namespace) -> int:
    """Train the multi-task network."""
    config = resolve_config(args, **_train_overrides(args))
    data = Path(args.data) if args.data else config.stage_dir("split")
    checkpoint = Path(args.out) if args.out else config.stage_dir("train") / stages.CHECKPOINT

    use_case = stages.TrainUseCase(
        create_manifest_repository(), create_checkpoint_repository()
    )
    trace = use_case.execute(_labeled_manifest(data), checkpoint, config.train, progress=True)
    config.write(checkpoint.parent)
    logger.info(f"Final combined loss {trace[-1].combined:.4f}; checkpoint {checkpoint}")
    return 0


def eval_command(args: argparse.Namespace) -> int:
    """Evaluate a checkpoint on one split."""
    config = resolve_config(args)
    checkpoint = (
        Path(args.ckpt) if args.ckpt else config.stage_dir("train") / stages.CHECKPOINT
    )
    manifest = Path(args.manifest) if args.manifest else config.stage_dir("split")
    out_path = Path(args.out) if args.out else config.stage_dir("eval") / stages.REPORT

    use_case = stages.EvaluateUseCase(
        create_manifest_repository(), create_checkpoint_repository()
    )
    report = use_case.execute(
        checkpoint, _labeled_manifest(manifest), out_path, Split(args.split)
    )
    config.write(out_path.parent)
    print(format_report(report), end="")
    return 0


def predict_command(args: argparse.Namespace) -> int:
    """Print the prediction for one image."""
    checkpoint = create_checkpoint_repository().load(Path(args.ckpt))
    prediction = predict(checkpoint.model, Path(args.image), checkpoint.train_config)
    print(prediction.format_line())
    return 0


def pipeline_command(args: argparse.Namespace) -> int:
    """Run every stage with caching."""
    config = resolve_config(
        args,
        seed=args.seed,
        n_properties=args.n_properties,
        cue_strength=args.cue_strength,
        dedup_threshold=args.threshold,
        train_fraction=args.train_fraction,
        properties_manifest=args.properties,
        images_manifest=args.images,
        **_train_overrides(args),
    )
    only = args.stages.split(",") if args.stages else None
    pipeline = create_pipeline(config.dedup_threshold)
    result = pipeline.execute(config, only=only, force=args.force, progress=True)
    logger.info(
        f"Pipeline finished: ran {', '.join(result.executed) or 'nothing'}; "
        f"skipped {', '.join(result.skipped) or 'nothing'}"
    )
    return 0


def parse_rates(text: str) -> tuple[float, ...]:
    """A preset name or a comma-separated list of learning rates."""
    if text in LEARNING_RATE_PRESETS:
        return LEARNING_RATE_PRESETS[text]
    try:
        rates = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        raise ConfigurationError(f"Invalid learning rates '{text}'", "rates") from e
    if not rates or any(rate <= 0 for rate in rates):
        raise ConfigurationError(f"Learning rates must be positive: '{text}'", "rates")
    return rates


def compare_lr_command(args: argparse.Namespace) -> int:
    """Train one model per learning rate and record the loss traces."""
    config = resolve_config(args, **_train_overrides(args))
    rates = parse_rates(args.rates)
    data = Path(args.data) if args.data else config.stage_dir("split")
    samples = create_manifest_repository().load_labeled(_labeled_manifest(data), Split.TRAIN)

    traces = compare_learning_rates(samples, config.train, rates)

    out_path = Path(args.out) if args.out else config.stage_dir("compare_lr") / "traces.json"
    out_path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        f"{rate:g}": [epoch.to_dict() for epoch in trace] for rate, trace in traces.items()
    }
    out_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    for rate, trace in traces.items():
        print(f"lr={rate:g} final_combined_loss={trace[-1].combined:.6f}")
    return 0


def report_command(args: argparse.Namespace) -> int:
    """Print text tables of a saved evaluation report."""
    print(format_report(read_report(Path(args.report))), end="")
    return 0
