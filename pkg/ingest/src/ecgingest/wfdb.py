"""Minimal reader for waveform-database records: header, signal, rhythm
annotations.

Supports the signal encodings used by the three annotated source
databases: format 212 (packed 12-bit pairs) and format 16 (little-endian
16-bit). Annotation files are the standard binary format; only rhythm
labels (aux strings starting with '(') are extracted.
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)


class FormatError(ValueError):
    pass


@dataclass(frozen=True)
class SignalSpec:
    filename: str
    fmt: int
    gain: float
    baseline: int
    name: str


@dataclass(frozen=True)
class RecordHeader:
    name: str
    n_signals: int
    fs: float
    n_samples: int
    signals: tuple


@dataclass(frozen=True)
class RhythmAnnotation:
    sample: int
    rhythm: str  # aux string, e.g. "(AFIB"


def read_header(path) -> RecordHeader:
    lines = [ln for ln in Path(path).read_text().splitlines()
             if ln.strip() and not ln.startswith("#")]
    head = lines[0].split()
    if len(head) < 4:
        raise FormatError(f"{path}: bad header line {lines[0]!r}")
    name, n_signals, fs, n_samples = head[0], int(head[1]), float(head[2]), int(head[3])
    specs = []
    for ln in lines[1:1 + n_signals]:
        f = ln.split()
        fmt = int(f[1].split("x")[0].split(":")[0].split("+")[0])
        gain_tok = f[2].split("/")[0] if len(f) > 2 else "200"
        if "(" in gain_tok:
            gain = float(gain_tok[:gain_tok.index("(")])
            baseline = int(gain_tok[gain_tok.index("(") + 1:gain_tok.index(")")])
        else:
            gain = float(gain_tok)
            baseline = int(f[4]) if len(f) > 4 else 0  # adczero
        if gain == 0:
            gain = 200.0
        desc = " ".join(f[8:]) if len(f) > 8 else f"ch{len(specs)}"
        specs.append(SignalSpec(f[0], fmt, gain, baseline, desc))
    return RecordHeader(name, n_signals, fs, n_samples, tuple(specs))


def _decode_212(raw: bytes, n_samples: int, n_signals: int) -> np.ndarray:
    """Unpack pairs of 12-bit samples from 3-byte groups."""
    total = n_samples * n_signals
    b = np.frombuffer(raw, dtype=np.uint8)
    n_groups = len(b) // 3
    b = b[:n_groups * 3].reshape(-1, 3).astype(np.int32)
    s0 = ((b[:, 1] & 0x0F) << 8) | b[:, 0]
    s1 = ((b[:, 1] & 0xF0) << 4) | b[:, 2]
    flat = np.empty(n_groups * 2, dtype=np.int32)
    flat[0::2], flat[1::2] = s0, s1
    flat = np.where(flat > 2047, flat - 4096, flat)
    if len(flat) < total:
        raise FormatError(f"signal file too short: {len(flat)} < {total} samples")
    return flat[:total].reshape(n_samples, n_signals)


def _decode_16(raw: bytes, n_samples: int, n_signals: int) -> np.ndarray:
    total = n_samples * n_signals
    flat = np.frombuffer(raw, dtype="<i2").astype(np.int32)
    if len(flat) < total:
        raise FormatError(f"signal file too short: {len(flat)} < {total} samples")
    return flat[:total].reshape(n_samples, n_signals)


def read_signals(header: RecordHeader, root) -> np.ndarray:
    """Physical-unit samples, shape (n_samples, n_signals).

    Assumes all leads share one signal file (true for the source
    databases); each lead is converted as (adc - baseline) / gain.
    """
    filenames = {s.filename for s in header.signals}
    if len(filenames) != 1:
        raise FormatError(f"{header.name}: multi-file records not supported")
    fmt = header.signals[0].fmt
    raw = (Path(root) / header.signals[0].filename).read_bytes()
    if fmt == 212:
        adc = _decode_212(raw, header.n_samples, header.n_signals)
    elif fmt == 16:
        adc = _decode_16(raw, header.n_samples, header.n_signals)
    else:
        raise FormatError(f"{header.name}: unsupported signal format {fmt}")
    out = np.empty(adc.shape, dtype=np.float64)
    for i, spec in enumerate(header.signals):
        out[:, i] = (adc[:, i] - spec.baseline) / spec.gain
    return out


# Annotation type codes with special meaning in the binary format.
_SKIP, _NUM, _SUBTYP, _CHN, _AUX = 59, 60, 61, 62, 63


def read_rhythm_annotations(path) -> list:
    """All (sample, rhythm) pairs whose aux string starts with '('."""
    raw = Path(path).read_bytes()
    out = []
    pos, t = 0, 0
    pending_skip = 0
    while pos + 2 <= len(raw):
        word = struct.unpack_from("<H", raw, pos)[0]
        pos += 2
        code, delta = word >> 10, word & 0x3FF
        if code == 0 and delta == 0:
            break
        if code == _SKIP:
            high, low = struct.unpack_from("<HH", raw, pos)
            pos += 4
            pending_skip = (high << 16) | low
            if pending_skip >= 1 << 31:
                pending_skip -= 1 << 32
        elif code == _AUX:
            aux = raw[pos:pos + delta].split(b"\x00")[0].decode("ascii", "replace")
            pos += delta + (delta & 1)  # pad to even
            if aux.startswith("("):
                out.append(RhythmAnnotation(t, aux))
        elif code in (_NUM, _SUBTYP, _CHN):
            pass
        else:
            t += delta + pending_skip
            pending_skip = 0
    return out
