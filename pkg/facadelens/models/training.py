"""
Training configuration and loss trace models.
"""

from dataclasses import asdict, dataclass, field
from typing import Any

# Learning-rate pairs for the rate comparison. "pretrained" suits a large
# pretrained backbone; "compact" keeps the same decade ratio at the small
# network's working point.
LEARNING_RATE_PRESETS: dict[str, tuple[float, float]] = {
    "pretrained": (1e-5, 1e-6),
    "compact": (1e-3, 1e-4),
}

TASKS: tuple[str, ...] = ("year", "structure", "ptype")

LR_SCHEDULES: tuple[str, ...] = ("cosine", "constant")


@dataclass
class TrainConfig:
    """Hyperparameters of one training run.

    With the ``cosine`` schedule the rate decays per batch from
    ``learning_rate`` to ``learning_rate * final_lr_fraction`` at the end of
    the last epoch.
    """

    learning_rate: float = 1e-3
    epochs: int = 10
    batch_size: int = 32
    seed: int = 0
    year_anchor: float = 1970.0
    year_scale: float = 50.0
    image_size: int = 128
    device: str = "cpu"
    lr_schedule: str = "cosine"
    final_lr_fraction: float = 0.01

    def validate(self) -> list[str]:
        """Return a list of validation errors."""
        errors = []
        if not self.learning_rate > 0:
            errors.append("learning_rate must be > 0")
        if self.batch_size < 1:
            errors.append("batch_size must be >= 1")
        if self.epochs < 1:
            errors.append("epochs must be >= 1")
        if not self.year_scale > 0:
            errors.append("year_scale must be > 0")
        if self.lr_schedule not in LR_SCHEDULES:
            errors.append(f"lr_schedule must be one of {', '.join(LR_SCHEDULES)}")
        if not 0.0 < self.final_lr_fraction <= 1.0:
            errors.append("final_lr_fraction must be in (0, 1]")
        return errors

    def normalize_year(self, year: float) -> float:
        """Map a Gregorian year onto the regression target scale."""
        return (year - self.year_anchor) / self.year_scale

    def denormalize_year(self, value: float) -> float:
        """Inverse of :meth:`normalize_year`."""
        return value * self.year_scale + self.year_anchor

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return asdict(self)


@dataclass
class EpochLoss:
    """Mean losses over one epoch plus the uncertainty scales at its end."""

    epoch: int
    combined: float
    year: float
    structure: float
    ptype: float
    sigmas: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "epoch": self.epoch,
            "combined": self.combined,
            "year": self.year,
            "structure": self.structure,
            "ptype": self.ptype,
            "sigmas": self.sigmas,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "EpochLoss":
        """Create EpochLoss from dictionary."""
        return cls(
            epoch=int(data["epoch"]),
            combined=float(data["combined"]),
            year=float(data["year"]),
            structure=float(data["structure"]),
            ptype=float(data["ptype"]),
            sigmas={k: float(v) for k, v in data.get("sigmas", {}).items()},
        )
