"""
Binary checkpoint container for the multi-task network.

Layout (all integers little-endian):

    magic        4 bytes  b"FLCK"
    version      uint32   CHECKPOINT_VERSION
    header_len   uint32   byte length of the JSON header
    header       UTF-8 JSON: architecture, train settings, tensor table
    tensors      float32 LE, concatenated in tensor-table order
    log_vars     float32 LE, one per task (year, structure, ptype)

The uncertainty log-variances are stored after the other tensors and are
not part of the tensor table.
"""

import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import torch

from ..exceptions.training import CheckpointError
from ..models.network import MultiTaskModel
from ..models.training import TASKS, TrainConfig

MAGIC = b"FLCK"
CHECKPOINT_VERSION = 1
_UNCERTAINTY_KEY = "uncertainty.log_vars"
_FLOAT = np.dtype("<f4")


@dataclass
class Checkpoint:
    """A network together with the settings it was trained with."""

    model: MultiTaskModel
    train_config: TrainConfig


class CheckpointRepository:
    """Reads and writes :class:`Checkpoint` files."""

    def save(self, path: Path, checkpoint: Checkpoint) -> None:
        """Write a checkpoint; the round trip is bit-exact."""
        path = Path(path)
        state = checkpoint.model.state_dict()
        names = [name for name in state if name != _UNCERTAINTY_KEY]

        header = {
            "architecture": checkpoint.model.architecture(),
            "train_config": checkpoint.train_config.to_dict(),
            "tensors": [
                {"name": name, "shape": list(state[name].shape)} for name in names
            ],
            "tasks": list(TASKS),
        }
        header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")

        chunks = [
            MAGIC,
            struct.pack("<II", CHECKPOINT_VERSION, len(header_bytes)),
            header_bytes,
        ]
        for name in names:
            chunks.append(_to_bytes(state[name]))
        chunks.append(_to_bytes(state[_UNCERTAINTY_KEY]))

        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(b"".join(chunks))
        except OSError as e:
            raise CheckpointError(f"Cannot write checkpoint {path}: {e}", str(path)) from e

    def load(self, path: Path) -> Checkpoint:
        """Read a checkpoint written by :meth:`save`."""
        path = Path(path)
        try:
            data = path.read_bytes()
        except OSError as e:
            raise CheckpointError(f"Cannot read checkpoint {path}: {e}", str(path)) from e

        if data[:4] != MAGIC:
            raise CheckpointError(f"{path} is not a checkpoint file", str(path))
        try:
            version, header_len = struct.unpack_from("<II", data, 4)
        except struct.error as e:
            raise CheckpointError(f"Truncated checkpoint {path}", str(path)) from e
        if version != CHECKPOINT_VERSION:
            raise CheckpointError(
                f"Unsupported checkpoint version {version} in {path}", str(path)
            )

        offset = 12
        try:
            header: dict[str, Any] = json.loads(data[offset : offset + header_len])
        except (json.JSONDecodeError, UnicodeDecodeError) as e:
            raise CheckpointError(f"Corrupt checkpoint header in {path}", str(path)) from e
        offset += header_len

        try:
            architecture = header["architecture"]
            model = MultiTaskModel(
                channels=architecture["channels"], image_size=architecture["image_size"]
            )
            train_config = TrainConfig(**header["train_config"])
            table = [
                (str(entry["name"]), [int(n) for n in entry["shape"]])
                for entry in header["tensors"]
            ]
            n_tasks = len(header["tasks"])
        except (KeyError, TypeError, ValueError, RuntimeError) as e:
            raise CheckpointError(f"Malformed checkpoint header in {path}: {e!r}", str(path)) from e

        state: dict[str, torch.Tensor] = {}
        for name, shape in table:
            if any(n < 0 for n in shape):
                raise CheckpointError(f"Negative tensor shape in checkpoint {path}", str(path))
            tensor, offset = _read_tensor(data, offset, shape, path)
            state[name] = tensor
        log_vars, offset = _read_tensor(data, offset, [n_tasks], path)
        state[_UNCERTAINTY_KEY] = log_vars

        if offset != len(data):
            raise CheckpointError(
                f"{len(data) - offset} trailing bytes in checkpoint {path}", str(path)
            )

        try:
            model.load_state_dict(state)
        except RuntimeError as e:
            raise CheckpointError(f"Checkpoint {path} does not fit the network: {e}") from e
        model.eval()
        return Checkpoint(model=model, train_config=train_config)


def _to_bytes(tensor: torch.Tensor) -> bytes:
    return tensor.detach().cpu().contiguous().numpy().astype(_FLOAT).tobytes()


def _read_tensor(
    data: bytes, offset: int, shape: list[int], path: Path
) -> tuple[torch.Tensor, int]:
    count = int(np.prod(shape)) if shape else 1
    end = offset + count * _FLOAT.itemsize
    if end > len(data):
        raise CheckpointError(f"Truncated checkpoint {path}", str(path))
    array = np.frombuffer(data, dtype=_FLOAT, count=count, offset=offset)
    tensor = torch.from_numpy(array.astype(np.float32).reshape(shape))
    return tensor, end
