"""
Near-duplicate removal and image category filtering.
"""

from collections import defaultdict
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field, replace
from pathlib import Path

from PIL import Image

from ..exceptions.imaging import ImageDecodeError
from ..external.category_filter import CategoryFilter
from ..logger import logger
from ..models.hashing import HASH_BITS, DuplicateCluster, PerceptualHash
from ..models.labels import CategoryVerdict
from ..models.records import ImageRecord, Rejection
from .imaging import load_image, phash

DEFAULT_THRESHOLD = 10

# Rejection reasons
UNREADABLE = "unreadable"
NEAR_DUPLICATE = "near_duplicate"
FILTER_ERROR = "filter_error"

ImageLoader = Callable[[Path], Image.Image]


def cluster_duplicates(
    hashes: Sequence[PerceptualHash], threshold: int = DEFAULT_THRESHOLD
) -> list[DuplicateCluster]:
    """Single-linkage clusters under Hamming distance <= threshold.

    Clusters partition the input; each is represented by its smallest image
    id, and clusters come back sorted by representative.
    """
    if not 0 <= threshold <= HASH_BITS:
        raise ValueError(f"threshold must be in [0, {HASH_BITS}], got {threshold}")

    parent = list(range(len(hashes)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(hashes)):
        for j in range(i + 1, len(hashes)):
            if hashes[i].distance(hashes[j]) <= threshold:
                root_i, root_j = find(i), find(j)
                if root_i != root_j:
                    parent[root_j] = root_i

    groups: dict[int, list[int]] = defaultdict(list)
    for i in range(len(hashes)):
        groups[find(i)].append(i)

    clusters = []
    for indices in groups.values():
        members = {hashes[i].source_image for i in indices}
        max_distance = max(
            (hashes[a].distance(hashes[b]) for a in indices for b in indices if a < b),
            default=0,
        )
        clusters.append(
            DuplicateCluster(
                representative=min(members),
                members=members,
                max_internal_distance=max_distance,
            )
        )
    return sorted(clusters, key=lambda c: c.representative)


def apply_category_filter(
    images: Iterable[ImageRecord],
    category_filter: CategoryFilter,
    loader: ImageLoader = load_image,
) -> tuple[list[ImageRecord], list[Rejection]]:
    """Keep images the filter judges ENTIRE_RESIDENTIAL.

    Every rejection records the verdict; decode or filter failures are
    rejected with reason ``filter_error`` and processing continues.
    """
    retained: list[ImageRecord] = []
    rejections: list[Rejection] = []
    for image in images:
        try:
            verdict = category_filter.classify(loader(image.path))
        except Exception as e:
            logger.warning(f"Category filter failed on {image.image_id}: {e}")
            rejections.append(Rejection(image.image_id, FILTER_ERROR, str(e)))
            continue

        if verdict is CategoryVerdict.ENTIRE_RESIDENTIAL:
            retained.append(replace(image, category_verdict=verdict))
        else:
            rejections.append(Rejection(image.image_id, verdict.value))
    return retained, rejections


@dataclass
class DedupResult:
    """Outcome of the dedup stage."""

    retained: list[ImageRecord]
    rejections: list[Rejection]
    clusters: list[DuplicateCluster] = field(default_factory=list)
    hashes: dict[str, int] = field(default_factory=dict)


class DedupService:
    """Hashes images, drops unreadable ones and near-duplicates per property,
    then applies the category filter."""

    def __init__(
        self,
        category_filter: CategoryFilter,
        threshold: int = DEFAULT_THRESHOLD,
        loader: ImageLoader = load_image,
    ):
        if not 0 <= threshold <= HASH_BITS:
            raise ValueError(f"threshold must be in [0, {HASH_BITS}], got {threshold}")
        self.category_filter = category_filter
        self.threshold = threshold
        self.loader = loader

    def hash_images(
        self, images: Iterable[ImageRecord], cache: dict[str, int] | None = None
    ) -> tuple[list[ImageRecord], list[Rejection]]:
        """Attach a hash to each image, reusing ``cache`` entries by image id."""
        cache = cache or {}
        hashed: list[ImageRecord] = []
        rejections: list[Rejection] = []
        for image in images:
            bits = cache.get(image.image_id)
            if bits is None:
                try:
                    bits = phash(self.loader(image.path), image.image_id).bits
                except ImageDecodeError as e:
                    rejections.append(Rejection(image.image_id, UNREADABLE, str(e)))
                    continue
            hashed.append(replace(image, phash=bits))
        return hashed, rejections

    def dedup_images(
        self, images: Sequence[ImageRecord], cache: dict[str, int] | None = None
    ) -> DedupResult:
        """Remove unreadable images and near-duplicates within each property.

        Duplicates across different properties are kept. Survivors then go
        through the category filter.
        """
        hashed, rejections = self.hash_images(images, cache)

        by_property: dict[str, list[ImageRecord]] = defaultdict(list)
        for image in hashed:
            by_property[image.property_id].append(image)

        representatives: set[str] = set()
        all_clusters: list[DuplicateCluster] = []
        for property_id in sorted(by_property):
            group = by_property[property_id]
            clusters = cluster_duplicates(
                [PerceptualHash(img.phash or 0, img.image_id) for img in group],
                self.threshold,
            )
            all_clusters.extend(clusters)
            for cluster in clusters:
                representatives.add(cluster.representative)
                for member in sorted(cluster.members - {cluster.representative}):
                    rejections.append(
                        Rejection(member, NEAR_DUPLICATE, cluster.representative)
                    )

        unique = [image for image in hashed if image.image_id in representatives]
        retained, filtered = apply_category_filter(
            unique, self.category_filter, self.loader
        )
        rejections.extend(filtered)

        return DedupResult(
            retained=retained,
            rejections=rejections,
            clusters=all_clusters,
            hashes={image.image_id: image.phash or 0 for image in hashed},
        )
