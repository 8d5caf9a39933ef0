"""
Argument parsing and dispatch for the ``facadelens`` command.
"""

import argparse
from collections.abc import Callable, Sequence

from ..config import PipelineConfig
from ..exceptions.base import FacadeLensException
from ..logger import logger
from ..models.labels import Split
from ..models.training import LEARNING_RATE_PRESETS
from . import commands

DEFAULTS = PipelineConfig()

Command = Callable[[argparse.Namespace], int]


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        metavar="FILE",
        help="YAML pipeline configuration; flags given on the command line override it",
    )
    common.add_argument(
        "--workdir",
        metavar="DIR",
        help=f"root of the stage directories (default: {DEFAULTS.workdir})",
    )
    return common


def _add_train_options(parser: argparse.ArgumentParser, with_lr: bool = True) -> None:
    train = DEFAULTS.train
    if with_lr:
        parser.add_argument(
            "--lr", type=float, help=f"Adam learning rate (default: {train.learning_rate:g})"
        )
    parser.add_argument("--epochs", type=int, help=f"training epochs (default: {train.epochs})")
    parser.add_argument(
        "--batch-size", type=int, help=f"minibatch size (default: {train.batch_size})"
    )
    parser.add_argument(
        "--seed", type=int, help=f"initialization and shuffling seed (default: {train.seed})"
    )
    parser.add_argument("--device", help=f"torch device (default: {train.device})")


def build_parser() -> argparse.ArgumentParser:
    """The full command-line interface."""
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="facadelens",
        description="Facade image risk pipeline: synthesize, clean, split, train, "
        "evaluate and predict construction year, structure, property type and "
        "fireproof class.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name: str, command: Command, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(
            name,
            parents=[common],
            help=help_text,
            description=help_text,
        )
        p.set_defaults(func=command)
        return p

    p = add("synth", commands.synth_command, "Render a labeled synthetic facade corpus.")
    p.add_argument(
        "--n-properties", type=int, help=f"number of properties (default: {DEFAULTS.n_properties})"
    )
    p.add_argument("--seed", type=int, help=f"generator seed (default: {DEFAULTS.seed})")
    p.add_argument(
        "--cue-strength",
        type=float,
        help=f"probability that each visual cue matches the labels "
        f"(default: {DEFAULTS.cue_strength})",
    )
    p.add_argument(
        "--images-min",
        type=int,
        help=f"fewest images per property (default: {DEFAULTS.images_per_property_min})",
    )
    p.add_argument(
        "--images-max",
        type=int,
        help=f"most images per property (default: {DEFAULTS.images_per_property_max})",
    )
    p.add_argument("--out", metavar="DIR", help="output directory (default: <workdir>/synth)")

    p = add("ingest", commands.ingest_command, "Filter metadata and drop orphaned images.")
    p.add_argument(
        "--properties", metavar="FILE", help="property manifest (default: synth output)"
    )
    p.add_argument("--images", metavar="FILE", help="image manifest (default: synth output)")
    p.add_argument("--out", metavar="DIR", help="output directory (default: <workdir>/ingest)")

    p = add(
        "dedup",
        commands.dedup_command,
        "Drop unreadable images, per-property near-duplicates and non-facade images.",
    )
    p.add_argument(
        "--images",
        "--manifest",
        dest="images",
        metavar="FILE",
        help="image manifest (default: ingest output)",
    )
    p.add_argument(
        "--threshold",
        type=int,
        help=f"largest Hamming distance treated as duplicate "
        f"(default: {DEFAULTS.dedup_threshold})",
    )
    p.add_argument("--no-cache", action="store_true", help="recompute every image hash")
    p.add_argument(
        "--out",
        metavar="PATH",
        help="retained-image manifest (*.jsonl) or output directory (default: <workdir>/dedup)",
    )

    p = add("split", commands.split_command, "Assign whole properties to train or test.")
    p.add_argument(
        "--properties", metavar="FILE", help="property manifest (default: ingest output)"
    )
    p.add_argument("--images", metavar="FILE", help="image manifest (default: dedup output)")
    p.add_argument("--seed", type=int, help=f"split seed (default: {DEFAULTS.seed})")
    p.add_argument(
        "--train-fraction",
        type=float,
        help=f"share of properties assigned to train (default: {DEFAULTS.train_fraction})",
    )
    p.add_argument("--out", metavar="DIR", help="output directory (default: <workdir>/split)")

    p = add("train", commands.train_command, "Train the multi-task network.")
    p.add_argument(
        "--data", metavar="PATH", help="split directory or labeled manifest (default: split output)"
    )
    _add_train_options(p)
    p.add_argument("--out", metavar="CKPT", help="checkpoint path (default: <workdir>/train)")

    p = add("eval", commands.eval_command, "Evaluate a checkpoint on one split.")
    p.add_argument("--ckpt", metavar="CKPT", help="checkpoint (default: train output)")
    p.add_argument(
        "--manifest", metavar="PATH", help="labeled manifest or split directory"
    )
    p.add_argument(
        "--split",
        choices=[s.value for s in Split],
        default=Split.TEST.value,
        help="split to evaluate (default: test)",
    )
    p.add_argument("--out", metavar="FILE", help="report path (default: <workdir>/eval)")

    p = add("predict", commands.predict_command, "Predict attributes of one image.")
    p.add_argument("--ckpt", metavar="CKPT", required=True, help="checkpoint")
    p.add_argument("--image", metavar="FILE", required=True, help="image file")

    p = add("pipeline", commands.pipeline_command, "Run all stages, skipping cached ones.")
    p.add_argument(
        "--n-properties",
        type=int,
        help=f"synthetic properties (default: {DEFAULTS.n_properties})",
    )
    p.add_argument(
        "--cue-strength",
        type=float,
        help=f"synthetic cue strength (default: {DEFAULTS.cue_strength})",
    )
    p.add_argument(
        "--threshold",
        type=int,
        help=f"dedup Hamming threshold (default: {DEFAULTS.dedup_threshold})",
    )
    p.add_argument(
        "--train-fraction",
        type=float,
        help=f"share of properties assigned to train (default: {DEFAULTS.train_fraction})",
    )
    p.add_argument("--properties", metavar="FILE", help="external property manifest")
    p.add_argument("--images", metavar="FILE", help="external image manifest")
    _add_train_options(p)
    p.add_argument("--stages", metavar="LIST", help="comma-separated subset of stages")
    p.add_argument("--force", action="store_true", help="ignore stage stamps")

    p = add(
        "compare-lr",
        commands.compare_lr_command,
        "Train one model per learning rate and compare final losses.",
    )
    p.add_argument(
        "--data", metavar="PATH", help="split directory or labeled manifest (default: split output)"
    )
    p.add_argument(
        "--rates",
        default="compact",
        help=f"preset ({', '.join(LEARNING_RATE_PRESETS)}) or comma-separated rates",
    )
    _add_train_options(p, with_lr=False)
    p.add_argument("--out", metavar="FILE", help="JSON output (default: <workdir>/compare_lr)")

    p = add("report", commands.report_command, "Print tables from a saved evaluation report.")
    p.add_argument("--report", metavar="FILE", required=True, help="report written by eval")

    return parser


def run(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv`` and run the selected command; returns the exit status."""
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FacadeLensException as e:
        logger.error(f"{args.command} failed: {e}")
        return 1
