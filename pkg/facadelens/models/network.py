"""
Multi-task network: shared convolutional backbone, three task heads and the
homoscedastic uncertainty weighting of the task losses.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import NamedTuple

import torch
import torch.nn.functional as F
from torch import nn

from ..exceptions.training import LossInputError, ShapeMismatchError
from .labels import PTYPE_ORDER, STRUCTURE_ORDER
from .training import TASKS

BACKBONE_CHANNELS: tuple[int, ...] = (16, 32, 64, 128)


class HeadOutputs(NamedTuple):
    """Raw head outputs for a batch."""

    year: torch.Tensor
    structure_logits: torch.Tensor
    ptype_logits: torch.Tensor


class HeadProbabilities(NamedTuple):
    """Normalized year plus per-head class probabilities."""

    year: torch.Tensor
    structure_probs: torch.Tensor
    ptype_probs: torch.Tensor


@dataclass
class TaskLoss:
    """Per-task losses of one batch."""

    year: torch.Tensor
    structure: torch.Tensor
    ptype: torch.Tensor

    def components(self) -> torch.Tensor:
        """Losses stacked in task order (year, structure, ptype)."""
        return torch.stack([self.year, self.structure, self.ptype])


class UncertaintyWeights(nn.Module):
    """Learnable log-variances ``s_i = log sigma_i^2``, one per task."""

    def __init__(self, n_tasks: int = len(TASKS)):
        super().__init__()
        self.log_vars = nn.Parameter(torch.zeros(n_tasks))

    @property
    def sigmas(self) -> torch.Tensor:
        """Task noise scales; positive for every finite log-variance."""
        return torch.exp(0.5 * self.log_vars.detach())

    def forward(self, losses: torch.Tensor) -> torch.Tensor:
        return combined_loss(losses, self.log_vars)


class ConvBlock(nn.Sequential):
    """3x3 convolution, ReLU, 2x max-pool."""

    def __init__(self, in_channels: int, out_channels: int):
        super().__init__(
            nn.Conv2d(in_channels, out_channels, kernel_size=3, padding=1),
            nn.ReLU(inplace=True),
            nn.MaxPool2d(2),
        )


class MultiTaskModel(nn.Module):
    """Compact CNN with year regression, structure and property-type heads.

    Inputs are NHWC batches with values in [0, 1].
    """

    def __init__(
        self,
        channels: Sequence[int] = BACKBONE_CHANNELS,
        image_size: int = 128,
    ):
        super().__init__()
        self.channels = tuple(channels)
        self.image_size = image_size

        blocks = []
        in_channels = 3
        for out_channels in self.channels:
            blocks.append(ConvBlock(in_channels, out_channels))
            in_channels = out_channels
        self.backbone = nn.Sequential(*blocks, nn.AdaptiveAvgPool2d(1), nn.Flatten())

        feature_dim = self.channels[-1]
        self.year_head = nn.Linear(feature_dim, 1)
        self.structure_head = nn.Linear(feature_dim, len(STRUCTURE_ORDER))
        self.ptype_head = nn.Linear(feature_dim, len(PTYPE_ORDER))
        self.uncertainty = UncertaintyWeights(len(TASKS))

    @property
    def feature_dim(self) -> int:
        return self.channels[-1]

    def check_batch(self, batch: torch.Tensor) -> None:
        """Raise ShapeMismatchError unless ``batch`` is N x S x S x 3."""
        expected = (self.image_size, self.image_size, 3)
        if batch.dim() != 4 or tuple(batch.shape[1:]) != expected:
            raise ShapeMismatchError(
                f"Expected batch of shape N x {expected[0]} x {expected[1]} x 3, "
                f"got {tuple(batch.shape)}",
                tuple(batch.shape),
            )

    def features(self, batch: torch.Tensor) -> torch.Tensor:
        """Shared representation consumed by every head."""
        return self.backbone(batch.permute(0, 3, 1, 2))

    def forward(self, batch: torch.Tensor) -> HeadOutputs:
        self.check_batch(batch)
        if batch.shape[0] == 0:
            return HeadOutputs(
                batch.new_zeros(0),
                batch.new_zeros((0, len(STRUCTURE_ORDER))),
                batch.new_zeros((0, len(PTYPE_ORDER))),
            )
        shared = self.features(batch)
        return HeadOutputs(
            self.year_head(shared).squeeze(1),
            self.structure_head(shared),
            self.ptype_head(shared),
        )

    @torch.no_grad()
    def predict_proba(self, batch: torch.Tensor) -> HeadProbabilities:
        """Forward pass with softmaxed classification heads."""
        outputs = self(batch)
        return HeadProbabilities(
            outputs.year,
            F.softmax(outputs.structure_logits, dim=1),
            F.softmax(outputs.ptype_logits, dim=1),
        )

    def task_losses(
        self,
        outputs: HeadOutputs,
        year_targets: torch.Tensor,
        structure_targets: torch.Tensor,
        ptype_targets: torch.Tensor,
    ) -> TaskLoss:
        """MSE for the normalized year, cross-entropy for the two classifiers."""
        return TaskLoss(
            year=F.mse_loss(outputs.year, year_targets),
            structure=F.cross_entropy(outputs.structure_logits, structure_targets),
            ptype=F.cross_entropy(outputs.ptype_logits, ptype_targets),
        )

    def architecture(self) -> dict[str, object]:
        """Hyperparameters needed to rebuild this network."""
        return {
            "channels": list(self.channels),
            "image_size": self.image_size,
            "feature_dim": self.feature_dim,
            "n_structure": len(STRUCTURE_ORDER),
            "n_ptype": len(PTYPE_ORDER),
            "tasks": list(TASKS),
        }


def combined_loss(
    losses: torch.Tensor | Sequence[float],
    log_vars: torch.Tensor | Sequence[float],
) -> torch.Tensor:
    """Uncertainty-weighted sum of task losses.

    Computes ``sum_i L_i / (2 exp(s_i)) + s_i / 2``, which is
    ``sum_i L_i / (2 sigma_i^2) + log sigma_i`` with ``sigma_i^2 = exp(s_i)``.
    """
    losses_t = _as_tensor(losses)
    log_vars_t = _as_tensor(log_vars).to(losses_t.dtype)

    if losses_t.shape != log_vars_t.shape:
        raise LossInputError(
            f"Got {tuple(losses_t.shape)} losses for {tuple(log_vars_t.shape)} log-variances"
        )
    if not bool(torch.isfinite(losses_t.detach()).all()):
        raise LossInputError(f"Non-finite task loss: {losses_t.detach().tolist()}")
    if not bool(torch.isfinite(log_vars_t.detach()).all()):
        raise LossInputError(f"Non-finite log-variance: {log_vars_t.detach().tolist()}")
    if bool((losses_t.detach() < 0).any()):
        raise LossInputError(f"Negative task loss: {losses_t.detach().tolist()}")

    return (losses_t * 0.5 * torch.exp(-log_vars_t) + 0.5 * log_vars_t).sum()


def _as_tensor(values: torch.Tensor | Sequence[float]) -> torch.Tensor:
    # Plain floats are promoted to float64 so hand-checked values stay exact.
    if isinstance(values, torch.Tensor):
        return values
    return torch.as_tensor(values, dtype=torch.float64)


def optimal_sigma(loss: float) -> float:
    """Minimizer of ``L / (2 sigma^2) + log sigma`` over sigma > 0, i.e. sqrt(L)."""
    if not math.isfinite(loss) or loss <= 0:
        raise LossInputError(f"optimal sigma needs a finite loss > 0, got {loss}")
    return math.sqrt(loss)
