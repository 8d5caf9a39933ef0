"""
Line-delimited JSON implementation of the manifest repository.

Property lines: ``property_id``, ``construction_year``, ``structure``,
``category`` (plus derived ``ptype``/``fireproof`` once filtered).
Image lines: ``image_id``, ``property_id``, ``path`` (relative to the
manifest's directory), optional ``phash`` and ``category_verdict``.
Labeled manifests extend image lines with the property labels and ``split``.
Split files: ``property_id<TAB>train|test``. Hash caches:
``image_id<TAB>16 hex digits``.
"""

import json
from collections.abc import Iterable
from pathlib import Path
from typing import Any

from ..exceptions.manifest import ManifestError
from ..logger import logger
from ..models.hashing import DuplicateCluster
from ..models.labels import (
    BuildingStructure,
    CategoryVerdict,
    FireproofClass,
    PropertyType,
    Split,
)
from ..models.records import (
    ImageRecord,
    LabeledImage,
    ManifestContents,
    ManifestDiagnostic,
    PropertyRecord,
    Rejection,
    SplitAssignment,
)
from ..models.training import EpochLoss
from .base import ManifestRepository

PROPERTY_FIELDS: tuple[str, ...] = (
    "property_id",
    "construction_year",
    "structure",
    "category",
)
IMAGE_FIELDS: tuple[str, ...] = ("image_id", "property_id", "path")
LABEL_FIELDS: tuple[str, ...] = (
    "construction_year",
    "structure",
    "ptype",
    "fireproof",
)


class _LineError(Exception):
    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class JsonlManifestRepository(ManifestRepository):
    """Manifests as UTF-8 JSON lines, splits and hash caches as TSV."""

    def load_manifest(self, path: Path) -> ManifestContents:
        """Parse a manifest; a line with ``image_id`` is an image record.

        Malformed lines are excluded and reported with their line number.
        """
        path = Path(path)
        contents = ManifestContents()

        for line_no, raw_bytes in enumerate(self._read_raw_lines(path), start=1):
            try:
                raw = raw_bytes.decode("utf-8")
            except UnicodeDecodeError as e:
                contents.diagnostics.append(
                    ManifestDiagnostic(line_no, f"invalid UTF-8 at byte {e.start}")
                )
                continue
            if not raw.strip():
                continue
            try:
                data = json.loads(raw)
                if not isinstance(data, dict):
                    raise _LineError("record is not a JSON object")
                if "image_id" in data:
                    contents.images.append(self._parse_image(data, path.parent))
                else:
                    contents.properties.append(self._parse_property(data))
            except json.JSONDecodeError as e:
                contents.diagnostics.append(
                    ManifestDiagnostic(line_no, f"invalid JSON: {e.msg}")
                )
            except _LineError as e:
                contents.diagnostics.append(ManifestDiagnostic(line_no, str(e), e.field))

        if contents.diagnostics:
            logger.warning(
                f"{path}: {len(contents.diagnostics)} malformed line(s) excluded"
            )
            for diagnostic in contents.diagnostics:
                logger.debug(f"{path}: {diagnostic}")
        return contents

    def save_properties(self, path: Path, records: Iterable[PropertyRecord]) -> None:
        """Write a property manifest."""
        self._write_jsonl(path, (r.to_dict() for r in records))

    def save_images(self, path: Path, images: Iterable[ImageRecord]) -> None:
        """Write an image manifest with paths relative to its directory."""
        base_dir = Path(path).parent.resolve()
        self._write_jsonl(
            path, (image.to_dict(base_dir=base_dir) for image in images)
        )

    def save_rejections(self, path: Path, rejections: Iterable[Rejection]) -> None:
        """Write a rejection log."""
        self._write_jsonl(path, (r.to_dict() for r in rejections))

    def save_split(self, path: Path, assignment: SplitAssignment) -> None:
        """Write ``property_id<TAB>split`` lines sorted by property id."""
        lines = [
            f"{pid}\t{assignment.assignments[pid].value}"
            for pid in sorted(assignment.assignments)
        ]
        self._write_text(path, lines)

    def load_split(self, path: Path) -> SplitAssignment:
        """Read a split file; seed and fraction are not stored in it."""
        assignments: dict[str, Split] = {}
        for line_no, raw in enumerate(self._read_lines(Path(path)), start=1):
            if not raw.strip():
                continue
            parts = raw.rstrip("\n").split("\t")
            try:
                if len(parts) != 2:
                    raise ValueError("expected two tab-separated columns")
                assignments[parts[0]] = Split(parts[1])
            except ValueError as e:
                raise ManifestError(f"{path}:{line_no}: {e}", str(path), line_no) from e
        return SplitAssignment(assignments=assignments, split_seed=-1)

    def save_hash_cache(self, path: Path, hashes: dict[str, int]) -> None:
        """Write ``image_id<TAB>hash`` lines sorted by image id."""
        self._write_text(
            path, [f"{image_id}\t{hashes[image_id]:016x}" for image_id in sorted(hashes)]
        )

    def load_hash_cache(self, path: Path) -> dict[str, int]:
        """Read a hash cache; a missing file is an empty cache."""
        path = Path(path)
        if not path.exists():
            return {}
        hashes: dict[str, int] = {}
        for line_no, raw in enumerate(self._read_lines(path), start=1):
            if not raw.strip():
                continue
            parts = raw.rstrip("\n").split("\t")
            if len(parts) != 2 or len(parts[1]) != 16:
                raise ManifestError(
                    f"{path}:{line_no}: expected image_id<TAB>16 hex digits",
                    str(path),
                    line_no,
                )
            try:
                hashes[parts[0]] = int(parts[1], 16)
            except ValueError as e:
                raise ManifestError(f"{path}:{line_no}: {e}", str(path), line_no) from e
        return hashes

    def save_clusters(self, path: Path, clusters: Iterable[DuplicateCluster]) -> None:
        """Write one cluster per line, sorted members."""
        self._write_jsonl(path, (c.to_dict() for c in clusters))

    def save_labeled(self, path: Path, images: Iterable[LabeledImage]) -> None:
        """Write a labeled manifest with paths relative to its directory."""
        base_dir = Path(path).parent.resolve()
        self._write_jsonl(path, (image.to_dict(base_dir=base_dir) for image in images))

    def load_labeled(self, path: Path, split: Split | None = None) -> list[LabeledImage]:
        """Read a labeled manifest; any malformed line is a hard error."""
        path = Path(path)
        base_dir = path.parent
        labeled: list[LabeledImage] = []
        for line_no, raw in enumerate(self._read_lines(path), start=1):
            if not raw.strip():
                continue
            try:
                data = json.loads(raw)
                if not isinstance(data, dict):
                    raise _LineError("expected a JSON object")
                image = self._parse_image(data, base_dir)
                for name in LABEL_FIELDS:
                    if data.get(name) is None:
                        raise _LineError("missing required field", name)
                record = LabeledImage(
                    image_id=image.image_id,
                    property_id=image.property_id,
                    path=image.path,
                    construction_year=int(data["construction_year"]),
                    structure=BuildingStructure.parse(str(data["structure"])),
                    ptype=PropertyType(data["ptype"]),
                    fireproof=FireproofClass(data["fireproof"]),
                    split=_optional(Split, data.get("split"), "split"),
                )
            except (json.JSONDecodeError, _LineError, ValueError, TypeError) as e:
                raise ManifestError(f"{path}:{line_no}: {e}", str(path), line_no) from e
            if split is None or record.split is split:
                labeled.append(record)
        return labeled

    def save_loss_trace(self, path: Path, trace: Iterable[EpochLoss]) -> None:
        """Write one epoch per line."""
        self._write_jsonl(path, (epoch.to_dict() for epoch in trace))

    def load_loss_trace(self, path: Path) -> list[EpochLoss]:
        """Read a loss trace written by :meth:`save_loss_trace`."""
        path = Path(path)
        trace: list[EpochLoss] = []
        for line_no, raw in enumerate(self._read_lines(path), start=1):
            if not raw.strip():
                continue
            try:
                trace.append(EpochLoss.from_dict(json.loads(raw)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
                raise ManifestError(f"{path}:{line_no}: {e}", str(path), line_no) from e
        return trace

    def _parse_property(self, data: dict[str, Any]) -> PropertyRecord:
        for name in PROPERTY_FIELDS:
            if name not in data:
                raise _LineError("missing required field", name)

        property_id = data["property_id"]
        if not isinstance(property_id, str) or not property_id:
            raise _LineError("property_id must be a non-empty string", "property_id")

        year = data["construction_year"]
        if year is not None:
            if isinstance(year, bool) or not isinstance(year, int | str):
                raise _LineError("construction_year must be an integer", "construction_year")
            try:
                year = int(year)
            except ValueError:
                raise _LineError(
                    "construction_year must be an integer", "construction_year"
                ) from None

        structure = data["structure"]
        if structure is not None:
            try:
                structure = BuildingStructure.parse(str(structure))
            except ValueError:
                raise _LineError(f"unknown structure '{structure}'", "structure") from None

        category = data["category"]
        if category is not None:
            category = str(category).strip() or None

        return PropertyRecord(
            property_id=property_id,
            construction_year=year,
            structure=structure,
            category=category,
            ptype=_optional(PropertyType, data.get("ptype"), "ptype"),
            fireproof=_optional(FireproofClass, data.get("fireproof"), "fireproof"),
        )

    def _parse_image(self, data: dict[str, Any], base_dir: Path) -> ImageRecord:
        for name in IMAGE_FIELDS:
            if name not in data:
                raise _LineError("missing required field", name)
            if not isinstance(data[name], str) or not data[name]:
                raise _LineError("must be a non-empty string", name)

        path = Path(data["path"])
        if not path.is_absolute():
            path = base_dir / path

        phash = data.get("phash")
        if phash is not None:
            try:
                phash = int(str(phash), 16)
            except ValueError:
                raise _LineError("phash must be hexadecimal", "phash") from None

        return ImageRecord(
            image_id=data["image_id"],
            property_id=data["property_id"],
            path=path,
            phash=phash,
            category_verdict=_optional(
                CategoryVerdict, data.get("category_verdict"), "category_verdict"
            ),
        )

    def _read_raw_lines(self, path: Path) -> list[bytes]:
        try:
            return Path(path).read_bytes().splitlines()
        except OSError as e:
            raise ManifestError(f"Cannot read manifest {path}: {e}", str(path)) from e

    def _read_lines(self, path: Path) -> list[str]:
        lines = []
        for line_no, raw in enumerate(self._read_raw_lines(path), start=1):
            try:
                lines.append(raw.decode("utf-8"))
            except UnicodeDecodeError as e:
                raise ManifestError(
                    f"{path}:{line_no}: invalid UTF-8 at byte {e.start}", str(path), line_no
                ) from e
        return lines

    def _write_jsonl(self, path: Path, records: Iterable[dict[str, Any]]) -> None:
        self._write_text(
            path, [json.dumps(r, ensure_ascii=False, sort_keys=True) for r in records]
        )

    def _write_text(self, path: Path, lines: list[str]) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        text = "".join(line + "\n" for line in lines)
        path.write_text(text, encoding="utf-8")


def _optional(enum_cls: Any, value: Any, field: str) -> Any:
    if value is None:
        return None
    try:
        return enum_cls(value)
    except ValueError:
        raise _LineError(f"unknown {field} '{value}'", field) from None
