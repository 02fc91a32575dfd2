"""Surrogate checkpoints: one JSON file, arrays as base64 float64 blobs.

The format is deliberately self-describing and byte-deterministic: the
same model always serializes to the same bytes, which the pipeline's
reproducibility guarantees rely on.
"""

from __future__ import annotations

import base64
import json
from pathlib import Path

import numpy as np

from .. import __version__
from .model import SurrogateModel

FORMAT_NAME = "glideropt-surrogate"
FORMAT_VERSION = 1


def _encode(arr: np.ndarray) -> dict:
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    return {"shape": list(arr.shape), "data": base64.b64encode(arr.tobytes()).decode("ascii")}


def _decode(entry: dict) -> np.ndarray:
    raw = base64.b64decode(entry["data"])
    arr = np.frombuffer(raw, dtype=np.float64).copy()
    return arr.reshape(entry["shape"])


def save_checkpoint(path: str | Path, model: SurrogateModel, dataset_fingerprint: str = "") -> None:
    model.validate()
    record = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "tool_version": __version__,
        "hidden_dims": list(model.hidden_dims),
        "n_cage_params": model.n_cage_params,
        "bn_momentum": model.bn_momentum,
        "dataset_fingerprint": dataset_fingerprint,
        "meta": model.meta,
        "params": {k: _encode(v) for k, v in sorted(model.params.items())},
        "running_mean": [_encode(v) for v in model.running_mean],
        "running_var": [_encode(v) for v in model.running_var],
        "input_mean": _encode(model.input_mean),
        "input_std": _encode(model.input_std),
    }
    Path(path).write_text(json.dumps(record, indent=1, sort_keys=True) + "\n")


def load_checkpoint(path: str | Path) -> tuple[SurrogateModel, str]:
    """Read and validate a checkpoint; returns (model, dataset_fingerprint)."""
    record = json.loads(Path(path).read_text())
    if record.get("format") != FORMAT_NAME:
        raise ValueError(f"{path}: not a surrogate checkpoint")
    if record.get("version") != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported checkpoint version {record.get('version')}")
    model = SurrogateModel(
        hidden_dims=tuple(record["hidden_dims"]),
        params={k: _decode(v) for k, v in record["params"].items()},
        running_mean=[_decode(v) for v in record["running_mean"]],
        running_var=[_decode(v) for v in record["running_var"]],
        input_mean=_decode(record["input_mean"]),
        input_std=_decode(record["input_std"]),
        bn_momentum=record["bn_momentum"],
        meta=record.get("meta", {}),
    )
    model.validate()
    return model, record.get("dataset_fingerprint", "")
