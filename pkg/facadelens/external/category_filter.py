"""
Image content category filters.

A category filter decides whether an image shows an entire residential
building. Real deployments plug in a learned image-text classifier; the
default here is a brightness and edge-statistics heuristic that accepts the
synthetic facades.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from PIL import Image
from scipy import ndimage

from ..models.labels import CategoryVerdict


class CategoryFilter(ABC):
    """Classifies one decoded image; deterministic for a fixed configuration."""

    @abstractmethod
    def classify(self, image: Image.Image) -> CategoryVerdict:
        """Return the content category of ``image``."""
        pass


@dataclass(frozen=True)
class HeuristicThresholds:
    """Decision thresholds of :class:`HeuristicCategoryFilter`."""

    analysis_size: int = 128
    min_brightness: float = 0.12
    max_brightness: float = 0.97
    edge_level: float = 0.1
    min_edge_density: float = 0.005
    max_edge_density: float = 0.6


class HeuristicCategoryFilter(CategoryFilter):
    """Brightness and edge-density rules.

    Too dark or washed out -> OTHER; almost no edges (sky, blank wall) ->
    NO_RESIDENTIAL; edges everywhere (cluttered interiors, noise) ->
    INSIDE_RESIDENTIAL; anything in between -> ENTIRE_RESIDENTIAL.
    """

    def __init__(self, thresholds: HeuristicThresholds | None = None):
        self.thresholds = thresholds or HeuristicThresholds()

    def statistics(self, image: Image.Image) -> tuple[float, float]:
        """Mean brightness in [0, 1] and share of edge pixels."""
        size = self.thresholds.analysis_size
        gray = image.convert("L").resize((size, size), Image.Resampling.BILINEAR)
        pixels = np.asarray(gray, dtype=np.float64) / 255.0

        # A unit step gives a Sobel magnitude of 4.
        magnitude = np.hypot(ndimage.sobel(pixels, axis=0), ndimage.sobel(pixels, axis=1))
        edge_density = float(np.mean(magnitude / 4.0 > self.thresholds.edge_level))
        return float(pixels.mean()), edge_density

    def classify(self, image: Image.Image) -> CategoryVerdict:
        t = self.thresholds
        brightness, edge_density = self.statistics(image)
        if not t.min_brightness <= brightness <= t.max_brightness:
            return CategoryVerdict.OTHER
        if edge_density < t.min_edge_density:
            return CategoryVerdict.NO_RESIDENTIAL
        if edge_density > t.max_edge_density:
            return CategoryVerdict.INSIDE_RESIDENTIAL
        return CategoryVerdict.ENTIRE_RESIDENTIAL
