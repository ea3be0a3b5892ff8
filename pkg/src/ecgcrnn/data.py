"""Canonical dataset format, subject-stratified splitting, and batching.

On-disk formats:
  - manifest: one JSON object per line with fields record_id, subject_id,
    database_id, label, fs, n_samples, path, lead.
  - signal payload: 16-byte header (magic 'ECG1', version u32, fs in mHz
    u32, length u32, all little-endian) + float32 LE samples + CRC32 of
    everything before it.
  - split file: "record_id<TAB>split" lines, sorted by record_id.
"""

from __future__ import annotations

import json
import logging
import struct
import warnings
import zlib
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from . import CLASS_ORDER
from .dsp import RawSignal
from .windowing import window_count, SignalTooShortError

log = logging.getLogger(__name__)

PAYLOAD_MAGIC = b"ECG1"
PAYLOAD_VERSION = 1
SPLITS = ("train", "validation", "test")


class LoadError(ValueError):
    pass


class ChecksumError(LoadError):
    pass


@dataclass(frozen=True)
class RecordMeta:
    record_id: str
    subject_id: str
    database_id: str
    label: str
    fs: float
    n_samples: int
    path: str
    lead: str = "I"

    def __post_init__(self):
        if self.label not in CLASS_ORDER:
            raise LoadError(f"unknown label {self.label!r} for {self.record_id}")

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.fs


# ---------------------------------------------------------------------------
# Manifest and payload IO
# ---------------------------------------------------------------------------

def write_manifest(path, records):
    path = Path(path)
    with open(path, "w") as f:
        for r in records:
            f.write(json.dumps(asdict(r), sort_keys=True) + "\n")


def load_manifest(path) -> list:
    path = Path(path)
    if not path.exists():
        raise LoadError(f"manifest not found: {path}")
    records = []
    for i, line in enumerate(path.read_text().splitlines(), 1):
        if not line.strip():
            continue
        try:
            records.append(RecordMeta(**json.loads(line)))
        except (json.JSONDecodeError, TypeError) as e:
            raise LoadError(f"{path}:{i}: bad manifest row: {e}") from e
    return records


def write_signal_payload(path, samples: np.ndarray, fs: float):
    path = Path(path)
    data = np.asarray(samples, dtype="<f4").tobytes()
    header = PAYLOAD_MAGIC + struct.pack(
        "<III", PAYLOAD_VERSION, int(round(fs * 1000)), len(samples))
    crc = zlib.crc32(header + data)
    path.write_bytes(header + data + struct.pack("<I", crc))


def load_signal_payload(path) -> tuple:
    """Returns (samples float64, fs). Raises on checksum or format errors."""
    path = Path(path)
    if not path.exists():
        raise LoadError(f"signal file not found: {path}")
    raw = path.read_bytes()
    if len(raw) < 20 or raw[:4] != PAYLOAD_MAGIC:
        raise LoadError(f"{path}: not a signal payload")
    version, fs_mhz, n = struct.unpack("<III", raw[4:16])
    if version != PAYLOAD_VERSION:
        raise LoadError(f"{path}: unsupported payload version {version}")
    expected_len = 16 + 4 * n + 4
    if len(raw) != expected_len:
        raise LoadError(f"{path}: truncated payload ({len(raw)} vs {expected_len} bytes)")
    crc = struct.unpack("<I", raw[-4:])[0]
    if zlib.crc32(raw[:-4]) != crc:
        raise ChecksumError(f"{path}: checksum mismatch")
    samples = np.frombuffer(raw, dtype="<f4", count=n, offset=16).astype(np.float64)
    return samples, fs_mhz / 1000.0


def load_signal(meta: RecordMeta, root=None) -> RawSignal:
    path = Path(meta.path)
    if root is not None and not path.is_absolute():
        path = Path(root) / path
    samples, fs = load_signal_payload(path)
    if fs != meta.fs:
        raise LoadError(f"{meta.record_id}: payload fs {fs} != manifest fs {meta.fs}")
    return RawSignal(samples, fs, meta=asdict(meta))


# ---------------------------------------------------------------------------
# Subject-stratified splitting
# ---------------------------------------------------------------------------

def write_split(path, assignment: dict):
    with open(path, "w") as f:
        for rid in sorted(assignment):
            f.write(f"{rid}\t{assignment[rid]}\n")


def load_split(path) -> dict:
    out = {}
    for line in Path(path).read_text().splitlines():
        if line.strip():
            rid, split = line.split("\t")
            out[rid] = split
    return out


def stratified_subject_split(records, targets=(0.6, 0.2, 0.2), seed: int = 0) -> dict:
    """Greedy subject assignment: no subject crosses splits, sizes and
    per-class proportions track the targets.

    Subjects are handled per database, in descending record count; each is
    assigned to the split minimizing squared deviation from the target
    sizes and class proportions. The seed only breaks exact cost ties.
    Returns record_id -> split name.
    """
    if len(targets) != 3 or abs(sum(targets) - 1.0) > 1e-9:
        raise ValueError(f"targets must be three fractions summing to 1, got {targets}")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    assignment: dict = {}
    databases = sorted({r.database_id for r in records})
    for db in databases:
        db_records = [r for r in records if r.database_id == db]
        total = len(db_records)
        classes = sorted({r.label for r in db_records}, key=CLASS_ORDER.index)
        overall = {c: sum(1 for r in db_records if r.label == c) / total for c in classes}

        by_subject: dict = {}
        for r in db_records:
            by_subject.setdefault(r.subject_id, []).append(r)
        # descending record count; seeded shuffle breaks count ties
        subjects = list(by_subject)
        rng.shuffle(subjects)
        subjects.sort(key=lambda s: -len(by_subject[s]))

        biggest = max(len(v) for v in by_subject.values())
        if biggest / total > max(targets) + 0.10:
            warnings.warn(
                f"database {db}: one subject holds {biggest}/{total} records; "
                f"split targets {targets} are unreachable")

        sizes = [0, 0, 0]
        class_counts = [dict.fromkeys(classes, 0) for _ in range(3)]
        for subj in subjects:
            recs = by_subject[subj]
            best, best_cost = 0, None
            for s in range(3):
                n_s = sizes[s] + len(recs)
                assigned = sum(sizes) + len(recs)
                cost = 0.0
                for j in range(3):
                    nj = n_s if j == s else sizes[j]
                    cost += (nj / total - targets[j] * assigned / total) ** 2
                for c in classes:
                    cc = class_counts[s][c] + sum(1 for r in recs if r.label == c)
                    if n_s > 0:
                        cost += (cc / n_s - overall[c]) ** 2 * (n_s / total)
                if best_cost is None or cost < best_cost - 1e-15:
                    best, best_cost = s, cost
            sizes[best] += len(recs)
            for r in recs:
                class_counts[best][r.label] += 1
                assignment[r.record_id] = SPLITS[best]
    return assignment


# ---------------------------------------------------------------------------
# Duration-sorted batching with leading zero-window padding
# ---------------------------------------------------------------------------

def make_batches(records, batch_size: int = 50, W: int = 1024,
                 epoch_rng: np.random.Generator | None = None) -> list:
    """Group records into duration-sorted batches of at most batch_size.

    Records shorter than one window are skipped with a log message. Batch
    order is shuffled by epoch_rng (composition stays fixed by the sort);
    without an rng the sorted order is kept.
    """
    usable = []
    for r in records:
        if r.n_samples < W:
            log.warning("skipping %s: %d samples < window %d", r.record_id,
                        r.n_samples, W)
            continue
        usable.append(r)
    usable.sort(key=lambda r: (r.duration_s, r.record_id))
    batches = [usable[i:i + batch_size] for i in range(0, len(usable), batch_size)]
    if epoch_rng is not None and len(batches) > 1:
        epoch_rng.shuffle(batches)
    return batches


def pad_window_stack(window_tensors) -> np.ndarray:
    """Stack per-signal (N_i, W, 1) tensors into (B, N_max, W, 1).

    Shorter signals are prepended with all-zero windows (padding is always
    a prefix, never suffix or interior).
    """
    n_max = max(t.shape[0] for t in window_tensors)
    W = window_tensors[0].shape[1]
    out = np.zeros((len(window_tensors), n_max, W, 1), dtype=np.float64)
    for i, t in enumerate(window_tensors):
        out[i, n_max - t.shape[0]:, :, :] = t
    return out
