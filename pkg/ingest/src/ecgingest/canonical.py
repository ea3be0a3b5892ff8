"""Writers for the canonical manifest + payload format.

This mirrors the format contract of the training pipeline (its external
interface), implemented independently here:
  - payload: magic 'ECG1' + u32 version + u32 fs in mHz + u32 length
    (little-endian) + float32 LE samples + CRC32 over everything before.
  - manifest: one JSON object per line with fields record_id, subject_id,
    database_id, label, fs, n_samples, path, lead.
"""

from __future__ import annotations

import json
import struct
import zlib
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

PAYLOAD_MAGIC = b"ECG1"
PAYLOAD_VERSION = 1
CLASSES = ("normal", "afib", "other", "noise")


@dataclass(frozen=True)
class CanonicalRecord:
    record_id: str
    subject_id: str
    database_id: str
    label: str
    fs: float
    n_samples: int
    path: str
    lead: str = "I"

    def __post_init__(self):
        if self.label not in CLASSES:
            raise ValueError(f"unknown class {self.label!r} for {self.record_id}")


def write_payload(path, samples: np.ndarray, fs: float):
    data = np.asarray(samples, dtype="<f4").tobytes()
    header = PAYLOAD_MAGIC + struct.pack(
        "<III", PAYLOAD_VERSION, int(round(fs * 1000)), len(samples))
    crc = zlib.crc32(header + data)
    Path(path).write_bytes(header + data + struct.pack("<I", crc))


def write_manifest(path, records):
    with open(path, "w") as f:
        for r in sorted(records, key=lambda r: r.record_id):
            f.write(json.dumps(asdict(r), sort_keys=True) + "\n")
