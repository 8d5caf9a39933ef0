"""
Evaluation report domain models.
"""

from dataclasses import dataclass, field
from typing import Any

from .labels import BuildingStructure, FireproofClass, PropertyType


@dataclass
class Prediction:
    """Model output for one image, fireproof class derived by rule."""

    year: float
    structure: BuildingStructure
    ptype: PropertyType
    fireproof: FireproofClass

    def format_line(self) -> str:
        """One-line rendering used by the predict command."""
        return (
            f"year={self.year:.2f} structure={self.structure.value} "
            f"ptype={self.ptype.value} fireproof={self.fireproof.value}"
        )


@dataclass
class RegressionReport:
    """Absolute-error summary for construction year, in years."""

    mae: float
    rmse: float
    medae: float
    n: int

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {"mae": self.mae, "rmse": self.rmse, "medae": self.medae, "n": self.n}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RegressionReport":
        """Create RegressionReport from dictionary."""
        return cls(
            mae=float(data["mae"]),
            rmse=float(data["rmse"]),
            medae=float(data["medae"]),
            n=int(data["n"]),
        )


@dataclass
class ClassificationReport:
    """Accuracy, averaged and per-class scores, and the confusion matrix.

    ``confusion[i][j]`` counts samples of true class ``classes[i]`` predicted
    as ``classes[j]``.
    """

    classes: list[str]
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    weighted_f1: float
    per_class_f1: dict[str, float]
    confusion: list[list[int]]

    @property
    def n(self) -> int:
        return sum(sum(row) for row in self.confusion)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "classes": self.classes,
            "accuracy": self.accuracy,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
            "weighted_f1": self.weighted_f1,
            "per_class_f1": self.per_class_f1,
            "confusion": self.confusion,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ClassificationReport":
        """Create ClassificationReport from dictionary."""
        return cls(
            classes=list(data["classes"]),
            accuracy=float(data["accuracy"]),
            macro_precision=float(data["macro_precision"]),
            macro_recall=float(data["macro_recall"]),
            macro_f1=float(data["macro_f1"]),
            weighted_f1=float(data["weighted_f1"]),
            per_class_f1={k: float(v) for k, v in data["per_class_f1"].items()},
            confusion=[[int(c) for c in row] for row in data["confusion"]],
        )

    def confusion_tsv(self) -> str:
        """Tab-separated grid with a header row and column of class names."""
        lines = ["\t".join(["true\\pred", *self.classes])]
        for name, row in zip(self.classes, self.confusion, strict=True):
            lines.append("\t".join([name, *(str(c) for c in row)]))
        return "\n".join(lines) + "\n"


@dataclass
class PropagationReport:
    """How often the derived fireproof class survives intermediate errors."""

    n: int
    n_intermediate_error: int
    n_fireproof_correct: int
    n_correct_despite_intermediate_error: int
    fraction_of_correct: float
    fraction_of_all: float
    # "pred_structure/pred_ptype -> true_structure/true_ptype" -> counts
    transitions: dict[str, dict[str, int]] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "n": self.n,
            "n_intermediate_error": self.n_intermediate_error,
            "n_fireproof_correct": self.n_fireproof_correct,
            "n_correct_despite_intermediate_error": self.n_correct_despite_intermediate_error,
            "fraction_of_correct": self.fraction_of_correct,
            "fraction_of_all": self.fraction_of_all,
            "transitions": self.transitions,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "PropagationReport":
        """Create PropagationReport from dictionary."""
        return cls(
            n=int(data["n"]),
            n_intermediate_error=int(data["n_intermediate_error"]),
            n_fireproof_correct=int(data["n_fireproof_correct"]),
            n_correct_despite_intermediate_error=int(
                data["n_correct_despite_intermediate_error"]
            ),
            fraction_of_correct=float(data["fraction_of_correct"]),
            fraction_of_all=float(data["fraction_of_all"]),
            transitions={
                k: {kk: int(vv) for kk, vv in v.items()}
                for k, v in data.get("transitions", {}).items()
            },
        )


@dataclass
class EraError:
    """Year error restricted to one era bucket of the true year."""

    era_start: int
    n: int
    mae: float
    medae: float

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "era_start": self.era_start,
            "n": self.n,
            "mae": self.mae,
            "medae": self.medae,
        }


@dataclass
class EvaluationReport:
    """Everything computed for one test split."""

    regression: RegressionReport
    structure: ClassificationReport
    ptype: ClassificationReport
    fireproof: ClassificationReport
    propagation: PropagationReport
    n_images: int
    n_excluded: int
    granularity: str = "per_image"
    year_by_era: list[EraError] = field(default_factory=list)
    exemplars: dict[str, list[str]] = field(default_factory=dict)

    def classification_reports(self) -> dict[str, ClassificationReport]:
        """Classification reports keyed by task name."""
        return {
            "structure": self.structure,
            "ptype": self.ptype,
            "fireproof": self.fireproof,
        }

    def to_records(self) -> list[dict[str, Any]]:
        """One dictionary per report line, header first."""
        records: list[dict[str, Any]] = [
            {
                "kind": "header",
                "granularity": self.granularity,
                "n_images": self.n_images,
                "n_excluded": self.n_excluded,
            },
            {"kind": "regression", "task": "year", **self.regression.to_dict()},
        ]
        for task, report in self.classification_reports().items():
            records.append({"kind": "classification", "task": task, **report.to_dict()})
        records.append({"kind": "propagation", **self.propagation.to_dict()})
        records.append(
            {"kind": "year_by_era", "eras": [e.to_dict() for e in self.year_by_era]}
        )
        records.append({"kind": "exemplars", "by_class": self.exemplars})
        return records

    @classmethod
    def from_records(cls, records: list[dict[str, Any]]) -> "EvaluationReport":
        """Rebuild a report from the lines produced by :meth:`to_records`."""
        by_kind: dict[str, dict[str, Any]] = {}
        classification: dict[str, ClassificationReport] = {}
        for record in records:
            kind = record.get("kind")
            if kind == "classification":
                classification[record["task"]] = ClassificationReport.from_dict(record)
            elif kind is not None:
                by_kind[kind] = record

        header = by_kind["header"]
        return cls(
            regression=RegressionReport.from_dict(by_kind["regression"]),
            structure=classification["structure"],
            ptype=classification["ptype"],
            fireproof=classification["fireproof"],
            propagation=PropagationReport.from_dict(by_kind["propagation"]),
            n_images=int(header["n_images"]),
            n_excluded=int(header["n_excluded"]),
            granularity=str(header.get("granularity", "per_image")),
            year_by_era=[
                EraError(**e) for e in by_kind.get("year_by_era", {}).get("eras", [])
            ],
            exemplars=by_kind.get("exemplars", {}).get("by_class", {}),
        )
