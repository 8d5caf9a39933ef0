"""
Training loop, inference and the learning-rate comparison experiment.
"""

from collections.abc import Callable, Sequence
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import torch
from PIL import Image
from torch.utils.data import DataLoader, Dataset
from tqdm import tqdm

from ..exceptions.imaging import ImageDecodeError
from ..exceptions.training import LossInputError, NonFiniteLossError, TrainingError
from ..logger import logger
from ..models.labels import PTYPE_ORDER, STRUCTURE_ORDER
from ..models.network import MultiTaskModel
from ..models.records import LabeledImage
from ..models.reports import Prediction
from ..models.training import TASKS, EpochLoss, TrainConfig
from .imaging import image_to_array, load_image
from .rules import fireproof_class

ADAM_BETAS = (0.9, 0.999)
ADAM_EPS = 1e-8

_STRUCTURE_INDEX = {s: i for i, s in enumerate(STRUCTURE_ORDER)}
_PTYPE_INDEX = {p: i for i, p in enumerate(PTYPE_ORDER)}

ModelFactory = Callable[[int, int], MultiTaskModel]


class FacadeDataset(Dataset):
    """Labeled images decoded once into memory as uint8 HWC arrays.

    Images that fail to decode are skipped and their ids kept in ``skipped``.
    """

    def __init__(self, samples: Sequence[LabeledImage], config: TrainConfig):
        self.config = config
        self.samples: list[LabeledImage] = []
        self.skipped: list[str] = []
        arrays = []
        for sample in samples:
            try:
                arrays.append(image_to_array(load_image(sample.path), config.image_size))
            except ImageDecodeError as e:
                logger.warning(f"Skipping {sample.image_id}: {e}")
                self.skipped.append(sample.image_id)
                continue
            self.samples.append(sample)

        size = config.image_size
        self.images = (
            np.stack(arrays) if arrays else np.zeros((0, size, size, 3), dtype=np.uint8)
        )
        self.years = np.array(
            [config.normalize_year(s.construction_year) for s in self.samples],
            dtype=np.float32,
        )
        self.structures = np.array(
            [_STRUCTURE_INDEX[s.structure] for s in self.samples], dtype=np.int64
        )
        self.ptypes = np.array([_PTYPE_INDEX[s.ptype] for s in self.samples], dtype=np.int64)

    def __len__(self) -> int:
        return len(self.samples)

    def __getitem__(self, index: int) -> tuple[torch.Tensor, ...]:
        image = torch.from_numpy(self.images[index].astype(np.float32) / 255.0)
        return (
            image,
            torch.tensor(self.years[index]),
            torch.tensor(self.structures[index]),
            torch.tensor(self.ptypes[index]),
        )


@dataclass
class TrainResult:
    """A trained network and its per-epoch loss trace."""

    model: MultiTaskModel
    trace: list[EpochLoss]


def build_model(seed: int, image_size: int = 128) -> MultiTaskModel:
    """Fresh network whose initial weights depend only on ``seed``."""
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(seed)
        return MultiTaskModel(image_size=image_size)


def build_scheduler(
    optimizer: torch.optim.Optimizer, config: TrainConfig, total_steps: int
) -> torch.optim.lr_scheduler.LRScheduler:
    """Per-batch learning-rate schedule named by ``config.lr_schedule``."""
    if config.lr_schedule == "constant":
        return torch.optim.lr_scheduler.LambdaLR(optimizer, lambda _: 1.0)
    return torch.optim.lr_scheduler.CosineAnnealingLR(
        optimizer,
        T_max=max(total_steps, 1),
        eta_min=config.learning_rate * config.final_lr_fraction,
    )


def train(
    model: MultiTaskModel,
    corpus: FacadeDataset | Sequence[LabeledImage],
    config: TrainConfig,
    progress: bool = False,
) -> TrainResult:
    """Jointly optimize backbone, heads and task log-variances with Adam.

    Minibatch order depends only on ``config.seed``. Raises TrainingError on
    an empty corpus and NonFiniteLossError naming the epoch and batch when
    the combined loss stops being finite.
    """
    errors = config.validate()
    if errors:
        raise TrainingError(f"Invalid training configuration: {'; '.join(errors)}")

    dataset = corpus if isinstance(corpus, FacadeDataset) else FacadeDataset(corpus, config)
    if len(dataset) == 0:
        raise TrainingError("Training corpus is empty", "EMPTY_CORPUS")

    torch.manual_seed(config.seed)
    generator = torch.Generator().manual_seed(config.seed)
    loader = DataLoader(
        dataset, batch_size=config.batch_size, shuffle=True, generator=generator
    )
    device = torch.device(config.device)
    model.to(device)
    optimizer = torch.optim.Adam(
        model.parameters(), lr=config.learning_rate, betas=ADAM_BETAS, eps=ADAM_EPS
    )
    scheduler = build_scheduler(optimizer, config, config.epochs * len(loader))

    trace: list[EpochLoss] = []
    for epoch in range(1, config.epochs + 1):
        model.train()
        totals = np.zeros(len(TASKS) + 1, dtype=np.float64)
        seen = 0
        batches = tqdm(
            loader, desc=f"Epoch {epoch}/{config.epochs}", leave=False, disable=not progress
        )
        for batch_index, (images, years, structures, ptypes) in enumerate(batches):
            images, years = images.to(device), years.to(device)
            structures, ptypes = structures.to(device), ptypes.to(device)

            outputs = model(images)
            components = model.task_losses(outputs, years, structures, ptypes).components()
            try:
                combined = model.uncertainty(components)
            except LossInputError:
                bad = components.detach().sum().item()
                raise NonFiniteLossError(epoch, batch_index, bad) from None
            if not torch.isfinite(combined):
                raise NonFiniteLossError(epoch, batch_index, combined.item())

            optimizer.zero_grad()
            combined.backward()
            optimizer.step()
            scheduler.step()

            n = images.shape[0]
            totals += n * np.array([combined.item(), *components.detach().cpu().tolist()])
            seen += n

        means = totals / seen
        sigmas = model.uncertainty.sigmas.cpu().tolist()
        epoch_loss = EpochLoss(
            epoch=epoch,
            combined=float(means[0]),
            year=float(means[1]),
            structure=float(means[2]),
            ptype=float(means[3]),
            sigmas=dict(zip(TASKS, sigmas, strict=True)),
        )
        trace.append(epoch_loss)
        logger.info(
            f"Epoch {epoch}/{config.epochs}: combined={epoch_loss.combined:.4f} "
            f"year={epoch_loss.year:.4f} structure={epoch_loss.structure:.4f} "
            f"ptype={epoch_loss.ptype:.4f} lr={scheduler.get_last_lr()[0]:.2e}"
        )

    model.eval()
    return TrainResult(model=model, trace=trace)


def decode_prediction(
    year_norm: float,
    structure_probs: Sequence[float],
    ptype_probs: Sequence[float],
    config: TrainConfig,
) -> Prediction:
    """Turn head outputs into labels; fireproof always comes from the rules."""
    structure = STRUCTURE_ORDER[int(np.argmax(structure_probs))]
    ptype = PTYPE_ORDER[int(np.argmax(ptype_probs))]
    return Prediction(
        year=config.denormalize_year(float(year_norm)),
        structure=structure,
        ptype=ptype,
        fireproof=fireproof_class(structure, ptype),
    )


def predict_batch(
    model: MultiTaskModel, arrays: np.ndarray, config: TrainConfig
) -> list[Prediction]:
    """Predict N x S x S x 3 uint8 images."""
    batch = torch.from_numpy(np.asarray(arrays, dtype=np.float32) / 255.0)
    device = next(model.parameters()).device
    model.eval()
    probs = model.predict_proba(batch.to(device))
    years = probs.year.cpu().numpy()
    structures = probs.structure_probs.cpu().numpy()
    ptypes = probs.ptype_probs.cpu().numpy()
    return [
        decode_prediction(years[i], structures[i], ptypes[i], config)
        for i in range(len(years))
    ]


def predict(
    model: MultiTaskModel, image: Image.Image | Path | str, config: TrainConfig
) -> Prediction:
    """Predict one image; paths that cannot be decoded raise ImageDecodeError."""
    if not isinstance(image, Image.Image):
        image = load_image(image)
    array = image_to_array(image, model.image_size)
    return predict_batch(model, array[np.newaxis], config)[0]


def compare_learning_rates(
    corpus: FacadeDataset | Sequence[LabeledImage],
    base_config: TrainConfig,
    rates: Sequence[float],
    model_factory: ModelFactory = build_model,
) -> dict[float, list[EpochLoss]]:
    """Train one fresh model per learning rate under an identical budget."""
    dataset = (
        corpus if isinstance(corpus, FacadeDataset) else FacadeDataset(corpus, base_config)
    )
    traces: dict[float, list[EpochLoss]] = {}
    for rate in rates:
        config = replace(base_config, learning_rate=rate)
        model = model_factory(config.seed, config.image_size)
        logger.info(f"Training with learning rate {rate:g}")
        traces[rate] = train(model, dataset, config).trace
    return traces
