"""
Regression and classification metrics, error propagation analysis and the
evaluation of a trained network on a test split.
"""

import json
from collections import defaultdict
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
from sklearn.metrics import (
    accuracy_score,
    confusion_matrix,
    mean_absolute_error,
    mean_squared_error,
    median_absolute_error,
    precision_recall_fscore_support,
)

from ..exceptions.evaluation import EvaluationError
from ..exceptions.imaging import ImageDecodeError
from ..logger import logger
from ..models.labels import (
    FIREPROOF_ORDER,
    PTYPE_ORDER,
    STRUCTURE_ORDER,
    BuildingStructure,
    FireproofClass,
    PropertyType,
)
from ..models.network import MultiTaskModel
from ..models.records import LabeledImage
from ..models.reports import (
    ClassificationReport,
    EraError,
    EvaluationReport,
    Prediction,
    PropagationReport,
    RegressionReport,
)
from ..models.training import TrainConfig
from .imaging import image_to_array, load_image
from .rules import fireproof_class
from .training import predict_batch

Intermediate = tuple[BuildingStructure, PropertyType]

EVAL_BATCH_SIZE = 64


def _check_lengths(preds: Sequence[Any], truths: Sequence[Any]) -> None:
    if len(preds) != len(truths):
        raise EvaluationError(
            f"Length mismatch: {len(preds)} predictions for {len(truths)} truths"
        )
    if not preds:
        raise EvaluationError("Cannot compute metrics on empty input")


def regression_metrics(preds: Sequence[float], truths: Sequence[float]) -> RegressionReport:
    """MAE, RMSE and MedAE in years."""
    _check_lengths(preds, truths)
    y_pred = np.asarray(preds, dtype=np.float64)
    y_true = np.asarray(truths, dtype=np.float64)
    return RegressionReport(
        mae=float(mean_absolute_error(y_true, y_pred)),
        rmse=float(np.sqrt(mean_squared_error(y_true, y_pred))),
        medae=float(median_absolute_error(y_true, y_pred)),
        n=len(preds),
    )


def _label(value: Any) -> str:
    return value.value if isinstance(value, Enum) else str(value)


def classification_metrics(
    preds: Sequence[Any], truths: Sequence[Any], classes: Sequence[Any]
) -> ClassificationReport:
    """Accuracy, macro and weighted scores, per-class F1 and confusion matrix.

    Undefined ratios (0/0) count as 0, and macro averages run over every
    class in ``classes`` including ones absent from both lists.
    """
    _check_lengths(preds, truths)
    labels = [_label(c) for c in classes]
    y_pred = [_label(p) for p in preds]
    y_true = [_label(t) for t in truths]

    unknown = sorted(set(y_pred + y_true) - set(labels))
    if unknown:
        raise EvaluationError(f"Labels outside {labels}: {unknown}")

    _, _, f1, _ = precision_recall_fscore_support(
        y_true, y_pred, labels=labels, average=None, zero_division=0
    )
    macro_p, macro_r, macro_f1, _ = precision_recall_fscore_support(
        y_true, y_pred, labels=labels, average="macro", zero_division=0
    )
    _, _, weighted_f1, _ = precision_recall_fscore_support(
        y_true, y_pred, labels=labels, average="weighted", zero_division=0
    )
    confusion = confusion_matrix(y_true, y_pred, labels=labels)

    return ClassificationReport(
        classes=labels,
        accuracy=float(accuracy_score(y_true, y_pred)),
        macro_precision=float(macro_p),
        macro_recall=float(macro_r),
        macro_f1=float(macro_f1),
        weighted_f1=float(weighted_f1),
        per_class_f1={label: float(score) for label, score in zip(labels, f1, strict=True)},
        confusion=confusion.astype(int).tolist(),
    )


def _pair_name(pair: Intermediate) -> str:
    return f"{pair[0].value}/{pair[1].value}"


def propagation_analysis(
    intermediate_preds: Sequence[Intermediate], truths: Sequence[Intermediate]
) -> PropagationReport:
    """Count correct fireproof predictions reached through wrong intermediates.

    ``transitions`` maps "predicted -> true" pairs of every sample with an
    intermediate error to how often the fireproof class still matched.
    """
    if len(intermediate_preds) != len(truths):
        raise EvaluationError(
            f"Length mismatch: {len(intermediate_preds)} predictions "
            f"for {len(truths)} truths"
        )

    n_intermediate_error = 0
    n_fireproof_correct = 0
    n_despite = 0
    transitions: dict[str, dict[str, int]] = defaultdict(
        lambda: {"fireproof_correct": 0, "fireproof_wrong": 0}
    )
    for pred, truth in zip(intermediate_preds, truths, strict=True):
        fireproof_ok = fireproof_class(*pred) is fireproof_class(*truth)
        intermediate_wrong = pred != truth
        n_fireproof_correct += fireproof_ok
        if intermediate_wrong:
            n_intermediate_error += 1
            n_despite += fireproof_ok
            key = f"{_pair_name(pred)} -> {_pair_name(truth)}"
            transitions[key]["fireproof_correct" if fireproof_ok else "fireproof_wrong"] += 1

    n = len(truths)
    return PropagationReport(
        n=n,
        n_intermediate_error=n_intermediate_error,
        n_fireproof_correct=n_fireproof_correct,
        n_correct_despite_intermediate_error=n_despite,
        fraction_of_correct=n_despite / n_fireproof_correct if n_fireproof_correct else 0.0,
        fraction_of_all=n_despite / n if n else 0.0,
        transitions={key: transitions[key] for key in sorted(transitions)},
    )


def year_error_by_era(
    preds: Sequence[float], truths: Sequence[float], bin_width: int = 10
) -> list[EraError]:
    """Absolute year error bucketed by the true year's era, oldest first."""
    _check_lengths(preds, truths)
    if bin_width < 1:
        raise EvaluationError(f"bin_width must be >= 1, got {bin_width}")

    errors: dict[int, list[float]] = defaultdict(list)
    for pred, truth in zip(preds, truths, strict=True):
        errors[int(truth // bin_width * bin_width)].append(abs(pred - truth))

    return [
        EraError(
            era_start=era,
            n=len(errors[era]),
            mae=float(np.mean(errors[era])),
            medae=float(np.median(errors[era])),
        )
        for era in sorted(errors)
    ]


@dataclass
class ScoredSample:
    """One test image with its prediction."""

    sample: LabeledImage
    prediction: Prediction


def select_exemplars(
    scored: Sequence[ScoredSample], tolerance_years: float = 3, per_class: int = 3
) -> dict[str, list[str]]:
    """Well-predicted image ids per true fireproof class, smallest error first."""
    by_class: dict[str, list[tuple[float, str]]] = {c.value: [] for c in FIREPROOF_ORDER}
    for item in scored:
        error = abs(item.prediction.year - item.sample.construction_year)
        if error <= tolerance_years:
            by_class[item.sample.fireproof.value].append((error, item.sample.image_id))
    return {
        name: [image_id for _, image_id in sorted(candidates)[:per_class]]
        for name, candidates in by_class.items()
    }


def score_samples(
    model: MultiTaskModel, samples: Sequence[LabeledImage], config: TrainConfig
) -> tuple[list[ScoredSample], list[str]]:
    """Predict every sample; returns the scored ones and the excluded ids."""
    scored: list[ScoredSample] = []
    excluded: list[str] = []
    readable: list[LabeledImage] = []
    arrays: list[np.ndarray] = []

    def flush() -> None:
        if not arrays:
            return
        predictions = predict_batch(model, np.stack(arrays), config)
        scored.extend(
            ScoredSample(s, p) for s, p in zip(readable, predictions, strict=True)
        )
        readable.clear()
        arrays.clear()

    for sample in samples:
        try:
            arrays.append(image_to_array(load_image(sample.path), model.image_size))
        except ImageDecodeError as e:
            logger.warning(f"Excluding {sample.image_id} from evaluation: {e}")
            excluded.append(sample.image_id)
            continue
        readable.append(sample)
        if len(arrays) == EVAL_BATCH_SIZE:
            flush()
    flush()
    return scored, excluded


def build_report(scored: Sequence[ScoredSample], n_excluded: int = 0) -> EvaluationReport:
    """Every metric for a set of predictions on labeled images."""
    if not scored:
        raise EvaluationError("No test images could be evaluated")

    samples = [item.sample for item in scored]
    predictions = [item.prediction for item in scored]
    year_preds = [p.year for p in predictions]
    year_truths = [float(s.construction_year) for s in samples]

    return EvaluationReport(
        regression=regression_metrics(year_preds, year_truths),
        structure=classification_metrics(
            [p.structure for p in predictions], [s.structure for s in samples], STRUCTURE_ORDER
        ),
        ptype=classification_metrics(
            [p.ptype for p in predictions], [s.ptype for s in samples], PTYPE_ORDER
        ),
        fireproof=classification_metrics(
            [p.fireproof for p in predictions], [s.fireproof for s in samples], FIREPROOF_ORDER
        ),
        propagation=propagation_analysis(
            [(p.structure, p.ptype) for p in predictions],
            [(s.structure, s.ptype) for s in samples],
        ),
        n_images=len(scored),
        n_excluded=n_excluded,
        year_by_era=year_error_by_era(year_preds, year_truths),
        exemplars=select_exemplars(scored),
    )


def write_report(report: EvaluationReport, out_path: Path) -> list[Path]:
    """Write the JSON-lines report and one confusion grid per task beside it."""
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(
        "".join(json.dumps(r, sort_keys=True) + "\n" for r in report.to_records()),
        encoding="utf-8",
    )
    written = [out_path]
    for task, classification in report.classification_reports().items():
        path = out_path.parent / f"confusion_{task}.tsv"
        path.write_text(classification.confusion_tsv(), encoding="utf-8")
        written.append(path)
    return written


def read_report(path: Path) -> EvaluationReport:
    """Load a report written by :func:`write_report`."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        return EvaluationReport.from_records([json.loads(line) for line in lines if line])
    except (OSError, json.JSONDecodeError, KeyError) as e:
        raise EvaluationError(f"Cannot read evaluation report {path}: {e}") from e


def evaluate_run(
    model: MultiTaskModel,
    config: TrainConfig,
    test_samples: Sequence[LabeledImage],
    out_path: Path | None = None,
) -> EvaluationReport:
    """Evaluate a trained network on the test split and optionally persist it.

    Undecodable images are logged and counted in ``n_excluded``.
    """
    if not test_samples:
        raise EvaluationError("Test split is empty")

    scored, excluded = score_samples(model, test_samples, config)
    report = build_report(scored, n_excluded=len(excluded))
    logger.info(
        f"Evaluated {report.n_images} images ({report.n_excluded} excluded): "
        f"year MAE={report.regression.mae:.2f}, "
        f"fireproof accuracy={report.fireproof.accuracy:.4f}"
    )
    if out_path is not None:
        write_report(report, out_path)
    return report


def format_report(report: EvaluationReport) -> str:
    """Plain-text tables for regression, intermediate and fireproof results."""
    lines = [
        f"Evaluated images: {report.n_images} ({report.granularity}), "
        f"excluded: {report.n_excluded}",
        "",
        "Construction year",
        f"  {'MAE':>8} {'RMSE':>8} {'MedAE':>8}",
        f"  {report.regression.mae:8.2f} {report.regression.rmse:8.2f} "
        f"{report.regression.medae:8.2f}",
        "",
        "Intermediate attributes",
        f"  {'task':<10} {'accuracy':>9} {'macro F1':>9} {'weighted F1':>12}",
    ]
    for task in ("structure", "ptype"):
        r = report.classification_reports()[task]
        lines.append(f"  {task:<10} {r.accuracy:9.4f} {r.macro_f1:9.4f} {r.weighted_f1:12.4f}")

    fireproof = report.fireproof
    lines += [
        "",
        "Fireproof class",
        f"  accuracy {fireproof.accuracy:.4f}  macro F1 {fireproof.macro_f1:.4f}  "
        f"weighted F1 {fireproof.weighted_f1:.4f}",
    ]
    for name in fireproof.classes:
        lines.append(
            f"  F1({name}) {fireproof.per_class_f1[name]:.4f}  {FireproofClass(name).description}"
        )

    propagation = report.propagation
    lines += [
        "",
        "Correct fireproof despite intermediate errors: "
        f"{propagation.n_correct_despite_intermediate_error} "
        f"({propagation.fraction_of_correct:.2%} of correct, "
        f"{propagation.fraction_of_all:.2%} of all)",
    ]
    return "\n".join(lines) + "\n"
