"""Synthetic ECG-like data for tests and desk-scale experiments.

Two-class task: pulse trains with regular RR intervals (class 0) versus
irregular RR intervals (class 1), mimicking the regular/fibrillating
rhythm distinction at 200 Hz.
"""

from __future__ import annotations

import numpy as np

from .training import LabeledSignal

FS = 200.0


def _pulse_train(rng: np.random.Generator, duration_s: float, regular: bool,
                 fs: float = FS) -> np.ndarray:
    n = int(duration_s * fs)
    x = np.zeros(n)
    # one template per signal: narrow positive spike with a small undershoot
    width = int(0.04 * fs)
    t = np.arange(-width, width + 1) / width
    template = np.exp(-12.0 * t * t) - 0.25 * np.exp(-12.0 * (t - 0.35) ** 2)
    amp = rng.uniform(0.8, 1.2)
    pos = rng.uniform(0.1, 0.5)
    base_rr = rng.uniform(0.7, 1.0)
    fast = rng.random() < 0.5
    while pos < duration_s - 0.2:
        center = int(pos * fs)
        lo = max(0, center - width)
        hi = min(n, center + width + 1)
        x[lo:hi] += amp * template[lo - (center - width):hi - (center - width)]
        if regular:
            pos += base_rr * rng.uniform(0.99, 1.01)
        else:
            # irregular rhythm: runs of fast and slow beats so the local
            # beat density varies along the recording
            if rng.random() < 0.25:
                fast = not fast
            pos += rng.uniform(0.3, 0.5) if fast else rng.uniform(1.0, 1.4)
    x += 0.02 * rng.standard_normal(n)
    # emulate the per-database amplitude scaling of the real pipeline
    return x / x.std()


def make_rr_dataset(n_train: int = 200, n_val: int = 50, duration_s: float = 30.0,
                    seed: int = 0) -> tuple:
    """Balanced regular/irregular pulse-train sets at 200 Hz.

    Returns (train, val) lists of LabeledSignal; class 0 regular, 1 irregular.
    """
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))

    def batch(n, prefix):
        out = []
        for i in range(n):
            label = i % 2
            sig = _pulse_train(rng, duration_s, regular=(label == 0))
            out.append(LabeledSignal(f"{prefix}{i:04d}", sig, label))
        return out

    return batch(n_train, "train"), batch(n_val, "val")
