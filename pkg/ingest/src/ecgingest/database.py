"""Converter for annotated two-lead waveform databases.

Reads every record listed in <src>/RECORDS (or every .hea file), cuts it
into 30 s single-rhythm segments, and emits one canonical record per
segment per lead. Subject identity comes from the source record name.
"""

from __future__ import annotations

import logging
from pathlib import Path

from . import wfdb
from .canonical import CanonicalRecord, write_manifest, write_payload
from .segment import segment_record

log = logging.getLogger(__name__)


def _record_names(src: Path) -> list:
    records_file = src / "RECORDS"
    if records_file.exists():
        return [ln.strip() for ln in records_file.read_text().splitlines()
                if ln.strip()]
    return sorted(p.stem for p in src.glob("*.hea"))


def convert_annotated_db(src, out, database_id: str,
                         exclude: str | None = None) -> tuple:
    """Segment every record; returns (records, n_skipped_records)."""
    src, out = Path(src), Path(out)
    out.mkdir(parents=True, exist_ok=True)
    names = _record_names(src)
    if not names:
        raise FileNotFoundError(f"no records found under {src}")
    records, skipped = [], 0
    for name in names:
        try:
            header = wfdb.read_header(src / f"{name}.hea")
            samples = wfdb.read_signals(header, src)
            annotations = wfdb.read_rhythm_annotations(src / f"{name}.atr")
        except (OSError, wfdb.FormatError) as e:
            log.warning("skipping record %s: %s", name, e)
            skipped += 1
            continue
        segments = segment_record(samples, header.fs, annotations, exclude)
        for seg in segments:
            for lead in range(samples.shape[1]):
                lead_name = header.signals[lead].name
                rid = f"{name}_s{seg.index:05d}_{lead}"
                path = f"{rid}.bin"
                write_payload(out / path, seg.samples[:, lead], header.fs)
                records.append(CanonicalRecord(
                    record_id=rid, subject_id=name, database_id=database_id,
                    label=seg.label, fs=header.fs,
                    n_samples=seg.samples.shape[0], path=path, lead=lead_name))
        log.info("%s: %d segments kept", name, len(segments))
    write_manifest(out / "manifest.jsonl", records)
    return records, skipped
