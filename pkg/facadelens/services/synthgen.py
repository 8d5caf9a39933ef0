"""
Procedural facade corpus.

Each property is drawn from a seeded generator keyed by (seed, index), so a
property renders identically no matter how many others are generated. Visual
cues:

* facade hue moves linearly from red-orange to blue across the year range;
  windows, doors and ground share the facade hue, so the mean image colour
  keeps it up to rounding
* floor count (rows of windows) follows the structure
* building width and door count follow the property type
"""

import colorsys
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw

from ..exceptions.evaluation import StageError
from ..exceptions.validation import ConfigurationError
from ..logger import logger
from ..models.labels import (
    PTYPE_ORDER,
    STRUCTURE_ORDER,
    BuildingStructure,
    PropertyType,
    RawPropertyCategory,
)
from ..models.records import ImageRecord, PropertyRecord
from ..repositories.base import ManifestRepository
from ..repositories.jsonl_manifest import JsonlManifestRepository
from .rules import fireproof_class

HUE_START = 0.05
HUE_END = 0.75

FLOOR_HEIGHT = 14
GROUND_LEVEL = 116
WINDOW_SIZE = 6
WINDOW_PITCH = 12
DOOR_WIDTH = 8
DOOR_HEIGHT = 10
CAMERA_JITTER = 6

FLOORS = {
    BuildingStructure.WOODEN_LIKE: (1, 2),
    BuildingStructure.STEEL_LIKE: (3, 4),
    BuildingStructure.CONCRETE_LIKE: (5, 7),
}

WIDTHS = {
    PropertyType.COMMUNAL: (88, 112),
    PropertyType.NON_COMMUNAL: (40, 56),
}

DOORS = {
    PropertyType.COMMUNAL: (2, 3),
    PropertyType.NON_COMMUNAL: (1, 1),
}

# M-heavy with T rare, close to a real listing corpus
DEFAULT_CLASS_MIX: Mapping[tuple[BuildingStructure, PropertyType], float] = {
    (BuildingStructure.CONCRETE_LIKE, PropertyType.COMMUNAL): 0.40,
    (BuildingStructure.CONCRETE_LIKE, PropertyType.NON_COMMUNAL): 0.05,
    (BuildingStructure.STEEL_LIKE, PropertyType.COMMUNAL): 0.15,
    (BuildingStructure.STEEL_LIKE, PropertyType.NON_COMMUNAL): 0.03,
    (BuildingStructure.WOODEN_LIKE, PropertyType.COMMUNAL): 0.12,
    (BuildingStructure.WOODEN_LIKE, PropertyType.NON_COMMUNAL): 0.25,
}

RAW_CATEGORIES: Mapping[PropertyType, tuple[tuple[RawPropertyCategory, float], ...]] = {
    PropertyType.COMMUNAL: (
        (RawPropertyCategory.APARTMENT, 0.90),
        (RawPropertyCategory.DORMITORY, 0.05),
        (RawPropertyCategory.SUBLEASE, 0.05),
    ),
    PropertyType.NON_COMMUNAL: (
        (RawPropertyCategory.HOUSE, 0.40),
        (RawPropertyCategory.SINGLE_FAMILY_HOUSE, 0.40),
        (RawPropertyCategory.TERRACE_HOUSE, 0.10),
        (RawPropertyCategory.TOWNHOUSE, 0.10),
    ),
}

# Construction years skew recent
YEAR_BETA = (2.6, 1.3)


@dataclass
class SynthSpec:
    """Parameters of a synthetic corpus."""

    n_properties: int = 2000
    images_per_property: tuple[int, int] = (1, 3)
    year_range: tuple[int, int] = (1915, 2025)
    cue_strength: float = 1.0
    seed: int = 0
    class_mix: Mapping[tuple[BuildingStructure, PropertyType], float] = field(
        default_factory=lambda: dict(DEFAULT_CLASS_MIX)
    )
    image_size: int = 128

    def validate(self) -> None:
        """Raise ConfigurationError naming the first invalid field."""
        if self.n_properties < 1:
            raise ConfigurationError("n_properties must be >= 1", "n_properties")
        low, high = self.images_per_property
        if not 1 <= low <= high:
            raise ConfigurationError(
                "images_per_property must satisfy 1 <= min <= max", "images_per_property"
            )
        year_min, year_max = self.year_range
        if not 1915 <= year_min < year_max <= 2025:
            raise ConfigurationError(
                "year_range must lie within [1915, 2025] with min < max", "year_range"
            )
        if not 0.0 <= self.cue_strength <= 1.0:
            raise ConfigurationError("cue_strength must be in [0, 1]", "cue_strength")
        if not self.class_mix or any(w < 0 for w in self.class_mix.values()):
            raise ConfigurationError("class_mix weights must be non-negative", "class_mix")
        if sum(self.class_mix.values()) <= 0:
            raise ConfigurationError("class_mix must have positive mass", "class_mix")
        if self.image_size != 128:
            raise ConfigurationError("synthetic images are 128 x 128", "image_size")


@dataclass(frozen=True)
class FacadeCues:
    """What a property's images show; may disagree with its labels under noise."""

    year: int
    floors: int
    width: int
    doors: int


@dataclass
class SynthCorpus:
    """Records of a generated corpus and where its manifests were written."""

    properties: list[PropertyRecord]
    images: list[ImageRecord]
    properties_manifest: Path
    images_manifest: Path


def year_to_hue(year: float, year_range: tuple[int, int] = (1915, 2025)) -> float:
    """Facade hue in [HUE_START, HUE_END] for a year, clamped to the range."""
    year_min, year_max = year_range
    t = (min(max(year, year_min), year_max) - year_min) / (year_max - year_min)
    return HUE_START + t * (HUE_END - HUE_START)


def _rgb(hue: float, saturation: float, value: float) -> tuple[int, int, int]:
    r, g, b = colorsys.hsv_to_rgb(hue, saturation, value)
    return round(r * 255), round(g * 255), round(b * 255)


def render_facade(cues: FacadeCues, year_range: tuple[int, int], shift: int = 0) -> Image.Image:
    """Draw one 128 x 128 facade, building centre moved by ``shift`` pixels."""
    hue = year_to_hue(cues.year, year_range)
    image = Image.new("RGB", (128, 128), _rgb(hue, 0.15, 0.97))
    draw = ImageDraw.Draw(image)

    dark = _rgb(hue, 0.6, 0.3)
    draw.rectangle((0, GROUND_LEVEL, 127, 127), fill=_rgb(hue, 0.6, 0.35))

    left = 64 + shift - cues.width // 2
    right = left + cues.width - 1
    top = GROUND_LEVEL - cues.floors * FLOOR_HEIGHT
    draw.rectangle((left, top, right, GROUND_LEVEL - 1), fill=_rgb(hue, 0.6, 0.8))

    n_cols = (cues.width - 8) // WINDOW_PITCH
    x0 = left + (cues.width - n_cols * WINDOW_PITCH) // 2 + (WINDOW_PITCH - WINDOW_SIZE) // 2
    for floor in range(cues.floors):
        y = top + floor * FLOOR_HEIGHT + 4
        for col in range(n_cols):
            x = x0 + col * WINDOW_PITCH
            draw.rectangle((x, y, x + WINDOW_SIZE - 1, y + WINDOW_SIZE - 1), fill=dark)

    spacing = cues.width / (cues.doors + 1)
    for k in range(1, cues.doors + 1):
        x = round(left + k * spacing - DOOR_WIDTH / 2)
        draw.rectangle(
            (x, GROUND_LEVEL - DOOR_HEIGHT, x + DOOR_WIDTH - 1, GROUND_LEVEL - 1), fill=dark
        )
    return image


def _draw_year(rng: np.random.Generator, year_range: tuple[int, int]) -> int:
    year_min, year_max = year_range
    return int(round(year_min + (year_max - year_min) * rng.beta(*YEAR_BETA)))


def _draw_cues(
    rng: np.random.Generator,
    year: int,
    structure: BuildingStructure,
    ptype: PropertyType,
    spec: SynthSpec,
) -> FacadeCues:
    # Each cue independently falls back to a random draw with prob 1 - cue_strength
    if rng.random() >= spec.cue_strength:
        year = int(rng.integers(spec.year_range[0], spec.year_range[1] + 1))
    if rng.random() >= spec.cue_strength:
        structure = STRUCTURE_ORDER[int(rng.integers(len(STRUCTURE_ORDER)))]
    if rng.random() >= spec.cue_strength:
        ptype = PTYPE_ORDER[int(rng.integers(len(PTYPE_ORDER)))]

    floors_low, floors_high = FLOORS[structure]
    width_low, width_high = WIDTHS[ptype]
    doors_low, doors_high = DOORS[ptype]
    return FacadeCues(
        year=year,
        floors=int(rng.integers(floors_low, floors_high + 1)),
        width=int(rng.integers(width_low, width_high + 1)),
        doors=int(rng.integers(doors_low, doors_high + 1)),
    )


def draw_property(
    spec: SynthSpec, index: int
) -> tuple[PropertyRecord, FacadeCues, list[int]]:
    """Labels, cues and per-image camera shifts of property ``index``."""
    rng = np.random.default_rng([spec.seed, index])

    pairs = sorted(spec.class_mix, key=lambda p: (p[0].value, p[1].value))
    weights = np.array([spec.class_mix[p] for p in pairs], dtype=np.float64)
    structure, ptype = pairs[int(rng.choice(len(pairs), p=weights / weights.sum()))]

    categories, category_weights = zip(*RAW_CATEGORIES[ptype], strict=True)
    category = categories[int(rng.choice(len(categories), p=category_weights))]
    year = _draw_year(rng, spec.year_range)

    record = PropertyRecord(
        property_id=f"p{index:06d}",
        construction_year=year,
        structure=structure,
        category=category.value,
        ptype=ptype,
        fireproof=fireproof_class(structure, ptype),
    )
    cues = _draw_cues(rng, year, structure, ptype, spec)

    low, high = spec.images_per_property
    n_images = int(rng.integers(low, high + 1))
    shifts = [int(s) for s in rng.integers(-CAMERA_JITTER, CAMERA_JITTER + 1, size=n_images)]
    return record, cues, shifts


def generate(
    spec: SynthSpec,
    out_dir: Path,
    repository: ManifestRepository | None = None,
) -> SynthCorpus:
    """Render the corpus under ``out_dir`` and write both manifests.

    Layout: ``images/<image_id>.png``, ``properties.jsonl``, ``images.jsonl``.
    """
    spec.validate()
    repository = repository or JsonlManifestRepository()
    out_dir = Path(out_dir)
    image_dir = out_dir / "images"
    try:
        image_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise StageError(f"Cannot create output directory {out_dir}: {e}", "synth") from e

    properties: list[PropertyRecord] = []
    images: list[ImageRecord] = []
    for index in range(spec.n_properties):
        record, cues, shifts = draw_property(spec, index)
        properties.append(record)
        for k, shift in enumerate(shifts):
            image_id = f"{record.property_id}-{k}"
            path = image_dir / f"{image_id}.png"
            try:
                render_facade(cues, spec.year_range, shift).save(path, format="PNG")
            except OSError as e:
                raise StageError(f"Cannot write image {path}: {e}", "synth") from e
            images.append(ImageRecord(image_id, record.property_id, path))

    properties_manifest = out_dir / "properties.jsonl"
    images_manifest = out_dir / "images.jsonl"
    try:
        repository.save_properties(properties_manifest, properties)
        repository.save_images(images_manifest, images)
    except OSError as e:
        raise StageError(f"Cannot write manifests in {out_dir}: {e}", "synth") from e
    logger.info(
        f"Synthesized {len(properties)} properties and {len(images)} images in {out_dir}"
    )
    return SynthCorpus(properties, images, properties_manifest, images_manifest)
