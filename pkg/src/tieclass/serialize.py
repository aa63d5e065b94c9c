"""Self-describing binary container for trained models.

Byte layout, all integers little-endian:

    bytes 0..3    magic b"TCM1"
    bytes 4..7    uint32 format version (currently 1)
    bytes 8..11   uint32 header length H
    bytes 12..11+H  UTF-8 JSON header: {"kind": str, "labels": [str, ...],
                  "hyper": {...}, "tensors": [{"name": str, "shape": [int]}]}
    remainder     tensor payloads in header order, float64 little-endian,
                  C-contiguous, no padding

Round-trips are bit-exact.
"""

from __future__ import annotations

import json
import struct

import numpy as np

MAGIC = b"TCM1"
VERSION = 1


def save_model(path, kind, labels, hyper, tensors):
    """tensors: ordered dict/list of (name, float64 array) pairs."""
    items = list(tensors.items()) if isinstance(tensors, dict) else list(tensors)
    header = {
        "kind": kind,
        "labels": list(labels),
        "hyper": hyper,
        "tensors": [{"name": n, "shape": list(a.shape)} for n, a in items],
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, len(blob)))
        fh.write(blob)
        for _, arr in items:
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_model(path):
    """Returns (kind, labels, hyper, tensors-dict)."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise ValueError(f"{path}: not a model file (bad magic {magic!r})")
        version, hlen = struct.unpack("<II", fh.read(8))
        if version != VERSION:
            raise ValueError(f"{path}: unsupported format version {version}")
        header = json.loads(fh.read(hlen).decode("utf-8"))
        tensors = {}
        for spec in header["tensors"]:
            count = int(np.prod(spec["shape"])) if spec["shape"] else 1
            raw = fh.read(8 * count)
            if len(raw) != 8 * count:
                raise ValueError(f"{path}: truncated tensor {spec['name']}")
            tensors[spec["name"]] = np.frombuffer(raw, dtype="<f8").reshape(
                spec["shape"]
            ).astype(np.float64)
    return header["kind"], tuple(header["labels"]), header["hyper"], tensors
