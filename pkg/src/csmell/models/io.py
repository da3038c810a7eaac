"""Model file format: a versioned JSON envelope plus a binary parameter blob.

Layout (all integers little-endian):

    bytes 0..7    magic b"CSMLMODL"
    bytes 8..11   format version (uint32), currently 1
    bytes 12..19  envelope length H (uint64)
    bytes 20..20+H  UTF-8 JSON envelope
    remainder     parameter blob

The envelope carries kind, hyperparameters, the label encoding, counts,
metadata/diagnostics, and an array manifest [{name, dtype, shape, offset,
nbytes}]. Each array is stored C-order with a little-endian dtype at its
stated offset relative to the blob start.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..corpus import LabelEncoding
from .base import ModelError, TrainedModel

MAGIC = b"CSMLMODL"
VERSION = 1


def _params_arrays(model: TrainedModel) -> dict[str, np.ndarray]:
    return model.params.arrays()


def save_model(model: TrainedModel, path: str | Path) -> None:
    arrays = _params_arrays(model)
    manifest = []
    blob_parts = []
    offset = 0
    for name in sorted(arrays):
        arr = np.ascontiguousarray(arrays[name])
        le = arr.dtype.newbyteorder("<")
        data = arr.astype(le, copy=False).tobytes()
        manifest.append(
            {
                "name": name,
                "dtype": le.str,
                "shape": list(arr.shape),
                "offset": offset,
                "nbytes": len(data),
            }
        )
        blob_parts.append(data)
        offset += len(data)

    envelope = {
        "kind": model.kind,
        "hyperparams": model.hyperparams,
        "labels": list(model.encoding.labels) if model.encoding else None,
        "n_features": model.n_features,
        "n_classes": model.n_classes,
        "metadata": model.metadata,
        "diagnostics": model.diagnostics,
        "proba_calibrated": model.proba_calibrated,
        "arrays": manifest,
    }
    header = json.dumps(envelope, ensure_ascii=False).encode("utf-8")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", VERSION))
        f.write(struct.pack("<Q", len(header)))
        f.write(header)
        for part in blob_parts:
            f.write(part)


def load_model(path: str | Path) -> TrainedModel:
    from . import rebuild_params  # deferred: io <-> dispatch

    with open(path, "rb") as f:
        if f.read(8) != MAGIC:
            raise ModelError(f"{path}: not a csmell model file")
        (version,) = struct.unpack("<I", f.read(4))
        if version != VERSION:
            raise ModelError(f"{path}: unsupported model format version {version}")
        (header_len,) = struct.unpack("<Q", f.read(8))
        envelope = json.loads(f.read(header_len).decode("utf-8"))
        blob = f.read()

    arrays: dict[str, np.ndarray] = {}
    for entry in envelope["arrays"]:
        start, nbytes = entry["offset"], entry["nbytes"]
        arr = np.frombuffer(blob[start : start + nbytes], dtype=np.dtype(entry["dtype"]))
        arrays[entry["name"]] = arr.reshape(entry["shape"]).copy()

    encoding = LabelEncoding(tuple(envelope["labels"])) if envelope["labels"] else None
    params = rebuild_params(envelope["kind"], envelope["hyperparams"], envelope["n_classes"], arrays)
    return TrainedModel(
        kind=envelope["kind"],
        hyperparams=envelope["hyperparams"],
        params=params,
        encoding=encoding,
        n_features=envelope["n_features"],
        n_classes=envelope["n_classes"],
        metadata=envelope["metadata"],
        diagnostics=envelope["diagnostics"],
        proba_calibrated=envelope["proba_calibrated"],
    )
