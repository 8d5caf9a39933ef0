"""
Content-hash stamps for pipeline stage caching.

A stage is fresh when its directory holds a stamp whose input digest equals
the digest of the current inputs and parameters, and every declared output
still exists. Digests cover file contents, never timestamps, so copied work
directories stay cached.
"""

import hashlib
import json
from collections.abc import Iterable
from pathlib import Path
from typing import Any

from ..logger import logger

STAMP_FILE = ".stamp.json"
_CHUNK = 1 << 20


def _update_with_file(digest: Any, path: Path) -> None:
    with path.open("rb") as handle:
        while chunk := handle.read(_CHUNK):
            digest.update(chunk)


def content_hash(inputs: Iterable[Path], params: dict[str, Any] | None = None) -> str:
    """sha256 over parameters and the bytes of every input.

    Directories contribute each file below them, ordered by relative path.
    A missing input hashes as a marker so its later appearance changes the
    digest.
    """
    digest = hashlib.sha256()
    digest.update(json.dumps(params or {}, sort_keys=True, default=str).encode("utf-8"))
    for path in sorted(Path(p) for p in inputs):
        digest.update(f"\0{path.name}\0".encode())
        if path.is_dir():
            for child in sorted(p for p in path.rglob("*") if p.is_file()):
                digest.update(f"\0{child.relative_to(path).as_posix()}\0".encode())
                _update_with_file(digest, child)
        elif path.is_file():
            _update_with_file(digest, path)
        else:
            digest.update(b"\0<missing>\0")
    return digest.hexdigest()


class StageStampStore:
    """Reads and writes ``.stamp.json`` files in stage directories."""

    def __init__(self, stamp_file: str = STAMP_FILE):
        self.stamp_file = stamp_file

    def _path(self, stage_dir: Path) -> Path:
        return Path(stage_dir) / self.stamp_file

    def get(self, stage_dir: Path) -> dict[str, Any] | None:
        """Stored stamp of a stage, or None if absent or unreadable."""
        path = self._path(stage_dir)
        if not path.exists():
            return None
        try:
            return json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            logger.warning(f"Ignoring unreadable stamp {path}: {e}")
            return None

    def set(self, stage_dir: Path, stage: str, digest: str, outputs: Iterable[str]) -> None:
        """Record a completed stage."""
        path = self._path(stage_dir)
        path.parent.mkdir(parents=True, exist_ok=True)
        stamp = {"stage": stage, "inputs": digest, "outputs": sorted(outputs)}
        path.write_text(json.dumps(stamp, sort_keys=True, indent=2) + "\n", encoding="utf-8")

    def delete(self, stage_dir: Path) -> None:
        """Forget a stage so it re-runs."""
        self._path(stage_dir).unlink(missing_ok=True)

    def is_fresh(self, stage_dir: Path, digest: str) -> bool:
        """True when the stamp matches ``digest`` and all outputs exist."""
        stamp = self.get(stage_dir)
        if stamp is None or stamp.get("inputs") != digest:
            return False
        return all((Path(stage_dir) / name).exists() for name in stamp.get("outputs", []))
