"""Portable checkpoint files: text manifest header + raw float64 arrays.

Layout: a UTF-8 header of one line per entry terminated by a blank line,
followed by each parameter array as row-major little-endian float64 in
header order. Round trips are bit-exact.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .config import ArchitectureConfig

MAGIC = "ECGCRNN-CHECKPOINT"
VERSION = 1


class CheckpointError(ValueError):
    pass


def save_checkpoint(path, config: ArchitectureConfig, params: dict):
    path = Path(path)
    lines = [f"{MAGIC} v{VERSION}", "config " + json.dumps(config.to_dict(), sort_keys=True)]
    for name, arr in params.items():
        shape = ",".join(str(s) for s in arr.shape)
        lines.append(f"array {name} {shape if shape else 'scalar'}")
    header = ("\n".join(lines) + "\n\n").encode()
    with open(path, "wb") as f:
        f.write(header)
        for arr in params.values():
            f.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_checkpoint(path):
    """Returns (config, params)."""
    path = Path(path)
    raw = path.read_bytes()
    end = raw.find(b"\n\n")
    if end < 0:
        raise CheckpointError(f"{path}: missing header terminator")
    lines = raw[:end].decode().split("\n")
    if not lines[0].startswith(MAGIC):
        raise CheckpointError(f"{path}: not a checkpoint file")
    if lines[0] != f"{MAGIC} v{VERSION}":
        raise CheckpointError(f"{path}: unsupported version {lines[0]!r}")
    if not lines[1].startswith("config "):
        raise CheckpointError(f"{path}: missing config line")
    config = ArchitectureConfig.from_dict(json.loads(lines[1][len("config "):]))
    params = {}
    offset = end + 2
    for line in lines[2:]:
        _, name, shape_s = line.split(" ")
        shape = () if shape_s == "scalar" else tuple(int(s) for s in shape_s.split(","))
        n = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(raw, dtype="<f8", count=n, offset=offset).reshape(shape)
        params[name] = arr.astype(np.float64)  # writable copy
        offset += 8 * n
    if offset != len(raw):
        raise CheckpointError(f"{path}: trailing bytes ({len(raw) - offset})")
    return config, params
