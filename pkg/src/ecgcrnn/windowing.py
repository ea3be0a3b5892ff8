"""Sliding-window extraction (50% overlap) and training-time augmentation.

The augmentation draws, per signal per epoch, a sign flip (probability
0.5) and then a uniform window offset; the draw order is fixed so seeded
runs are exactly reproducible.
"""

from __future__ import annotations

import hashlib

import numpy as np


class SignalTooShortError(ValueError):
    pass


def window_count(M: int, W: int) -> int:
    """Maximum number of 50%-overlapping windows of size W in M samples."""
    if M < W:
        raise SignalTooShortError(f"signal length {M} shorter than window {W}")
    if W % 2 != 0:
        raise ValueError("window size must be even")
    return (2 * (M - W)) // W + 1


def max_offset(M: int, W: int) -> int:
    """Largest admissible start offset keeping the maximal window count."""
    N = window_count(M, W)
    return M - (N - 1) * W // 2 - W


def extract_windows(x: np.ndarray, W: int, offset: int = 0) -> np.ndarray:
    """Extract the maximal set of 50%-overlapping windows as (N, W, 1).

    Window i covers x[offset + i*W/2 : offset + i*W/2 + W].
    """
    x = np.asarray(x)
    M = len(x)
    N = window_count(M, W)
    if not 0 <= offset <= max_offset(M, W):
        raise ValueError(
            f"offset {offset} outside [0, {max_offset(M, W)}] for M={M}, W={W}")
    step = W // 2
    out = np.empty((N, W, 1), dtype=np.float64)
    for i in range(N):
        start = offset + i * step
        out[i, :, 0] = x[start:start + W]
    return out


def random_augment(x: np.ndarray, W: int, rng: np.random.Generator,
                   flip_enabled: bool = True, offset_enabled: bool = True):
    """Training-time augmentation: optional sign flip, then random offset.

    Returns (signal, offset). Draw order is flip first, then offset, and
    both draws happen even when disabled so toggles do not shift the rng
    stream of later records.
    """
    flip = rng.random() < 0.5
    off = int(rng.integers(0, max_offset(len(x), W) + 1))
    if not flip_enabled:
        flip = False
    if not offset_enabled:
        off = 0
    return (-x if flip else x), off


def record_rng(run_seed: int, epoch: int, record_id: str) -> np.random.Generator:
    """Per-(epoch, record) substream so parallel schedules stay deterministic."""
    rid = int.from_bytes(hashlib.sha256(record_id.encode()).digest()[:8], "little")
    ss = np.random.SeedSequence([run_seed, epoch, rid])
    return np.random.Generator(np.random.PCG64(ss))
