"""Segmentation of annotated two-lead records into 30-second signals.

Rule: non-overlapping 30 s grid from record start; a segment is kept iff
exactly one rhythm annotation spans it entirely; each kept segment emits
one record per lead. Class map: normal rhythm -> normal, atrial
fibrillation -> afib, the 14 other annotated rhythms -> other. Unknown
rhythm strings are a hard error, never silently 'other'.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)

SEGMENT_SECONDS = 30.0

RHYTHM_CLASS = {
    "(N": "normal",     # normal sinus rhythm
    "(NSR": "normal",
    "(AFIB": "afib",    # atrial fibrillation
    "(AB": "other",     # atrial bigeminy
    "(AFL": "other",    # atrial flutter
    "(B": "other",      # ventricular bigeminy
    "(BII": "other",    # heart block
    "(IVR": "other",    # idioventricular rhythm
    "(NOD": "other",    # nodal rhythm
    "(P": "other",      # paced rhythm
    "(PREX": "other",   # pre-excitation
    "(SBR": "other",    # sinus bradycardia
    "(SVTA": "other",   # supraventricular tachyarrhythmia
    "(T": "other",      # ventricular trigeminy
    "(VF": "other",     # ventricular fibrillation
    "(VFL": "other",    # ventricular flutter
    "(VT": "other",     # ventricular tachycardia
}


class UnknownRhythmError(ValueError):
    pass


@dataclass(frozen=True)
class Segment:
    index: int        # position on the 30 s grid
    start: int        # first sample
    label: str        # canonical class
    samples: np.ndarray  # (segment_len, n_leads)


def rhythm_class(aux: str) -> str:
    key = aux.strip().rstrip("\x00")
    if key not in RHYTHM_CLASS:
        raise UnknownRhythmError(f"unmapped rhythm annotation {aux!r}")
    return RHYTHM_CLASS[key]


def segment_record(samples: np.ndarray, fs: float, annotations,
                   exclude: str | None = None) -> list:
    """Cut one annotated record into kept segments.

    samples: (n_samples, n_leads); annotations: iterable of objects with
    .sample and .rhythm, sorted by sample. A segment is kept iff its whole
    span lies inside a single rhythm interval. `exclude` drops one class
    after mapping (for the binary task).
    """
    ann = sorted(annotations, key=lambda a: a.sample)
    if not ann:
        log.warning("record has no rhythm annotations; zero segments")
        return []
    seg_len = int(round(SEGMENT_SECONDS * fs))
    starts = [a.sample for a in ann]
    labels = [rhythm_class(a.rhythm) for a in ann]
    out = []
    for idx in range(samples.shape[0] // seg_len):
        lo, hi = idx * seg_len, (idx + 1) * seg_len
        k = np.searchsorted(starts, lo, side="right") - 1
        if k < 0:
            continue  # rhythm undefined at segment start
        nxt = starts[k + 1] if k + 1 < len(starts) else samples.shape[0]
        if nxt < hi:
            continue  # rhythm changes inside the segment
        if exclude is not None and labels[k] == exclude:
            continue
        out.append(Segment(idx, lo, labels[k], samples[lo:hi]))
    return out
