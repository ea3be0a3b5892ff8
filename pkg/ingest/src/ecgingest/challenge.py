"""Converter for the single-lead challenge archive.

Source layout: <src>/REFERENCE.csv with rows "record,label" (N/A/O/~)
and one .mat file per record holding the samples under the key 'val'
(ADC units at 300 Hz, 1000 units/mV).
"""

from __future__ import annotations

import csv
import logging
from pathlib import Path

import numpy as np
from scipy.io import loadmat

from .canonical import CanonicalRecord, write_manifest, write_payload

log = logging.getLogger(__name__)

FS = 300.0
ADC_GAIN = 1000.0
LABEL_MAP = {"N": "normal", "A": "afib", "O": "other", "~": "noise"}


def convert_challenge_set(src, out) -> tuple:
    """Convert every labeled record; returns (records, n_skipped).

    Unreadable records are skipped and logged; the manifest omits them.
    """
    src, out = Path(src), Path(out)
    out.mkdir(parents=True, exist_ok=True)
    reference = src / "REFERENCE.csv"
    if not reference.exists():
        raise FileNotFoundError(f"missing label file: {reference}")
    records, skipped = [], 0
    with open(reference) as f:
        for row in csv.reader(f):
            if not row:
                continue
            name, label_code = row[0].strip(), row[1].strip()
            if label_code not in LABEL_MAP:
                raise ValueError(f"{name}: unknown label code {label_code!r}")
            try:
                mat = loadmat(src / f"{name}.mat")
                samples = np.asarray(mat["val"], dtype=np.float64).ravel() / ADC_GAIN
                if samples.size == 0:
                    raise ValueError("empty signal")
            except Exception as e:  # noqa: BLE001 - skip-and-log contract
                log.warning("skipping %s: %s", name, e)
                skipped += 1
                continue
            path = f"{name}.bin"
            write_payload(out / path, samples, FS)
            records.append(CanonicalRecord(
                record_id=name, subject_id=name, database_id="challenge",
                label=LABEL_MAP[label_code], fs=FS, n_samples=samples.size,
                path=path))
    write_manifest(out / "manifest.jsonl", records)
    if skipped:
        log.warning("skipped %d unreadable records", skipped)
    return records, skipped
