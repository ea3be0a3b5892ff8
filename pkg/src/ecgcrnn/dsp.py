"""Signal conditioning: zero-phase band-pass, resampling to 200 Hz, scaling.

Pipeline order is fixed: filter -> resample -> scale. All functions are
pure; scale statistics are a deterministic reduction over the training
split only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

import numpy as np
from scipy import signal

TARGET_FS = 200.0
BAND_LOW = 0.5
BAND_HIGH = 40.0
FILTER_ORDER = 4  # band-pass -> 8 poles, applied forward and backward


class UnsupportedRateError(ValueError):
    pass


class ScaleError(ValueError):
    pass


@dataclass(frozen=True)
class RawSignal:
    """One ECG lead with provenance metadata."""

    samples: np.ndarray
    fs: float
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=np.float64))
        if self.samples.ndim != 1 or len(self.samples) < 2:
            raise ValueError("signal must be a 1-D array of length >= 2")
        if self.fs <= 0:
            raise ValueError("sampling frequency must be positive")

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.fs


def _bandpass_sos(fs: float):
    return signal.butter(FILTER_ORDER, [BAND_LOW, BAND_HIGH],
                         btype="bandpass", fs=fs, output="sos")


def bandpass_zero_phase(x: RawSignal, low: float = BAND_LOW,
                        high: float = BAND_HIGH) -> RawSignal:
    """Forward-backward Butterworth band-pass (zero net phase shift).

    Cascaded second-order sections for stability at the 0.5 Hz edge;
    odd-symmetric edge extension over three time constants of the slowest
    pole suppresses startup transients. The result is symmetrized over the
    two reversal orders, so reversing the input exactly reverses the
    output. Output length equals input length.
    """
    if x.fs <= 2 * high:
        raise UnsupportedRateError(
            f"fs={x.fs} Hz too low for a {high} Hz band edge")
    sos = signal.butter(FILTER_ORDER, [low, high], btype="bandpass",
                        fs=x.fs, output="sos")
    padlen = min(int(round(3 * x.fs / low)), len(x.samples) - 1)
    fwd = signal.sosfiltfilt(sos, x.samples, padtype="odd", padlen=padlen)
    bwd = signal.sosfiltfilt(sos, x.samples[::-1], padtype="odd", padlen=padlen)[::-1]
    return RawSignal(0.5 * (fwd + bwd), x.fs, dict(x.meta))


def _resample_filter(up: int, down: int):
    """Windowed-sinc anti-aliasing filter: Kaiser beta=8, 32 taps per phase."""
    max_rate = max(up, down)
    n_taps = 32 * up + 1
    # resample_poly scales the filter by `up` itself, so unity DC gain here
    return signal.firwin(n_taps, 1.0 / max_rate, window=("kaiser", 8.0))


def resample(x: RawSignal, target_fs: float = TARGET_FS) -> RawSignal:
    """Polyphase rational-ratio resampling to the target rate.

    Output length is round(len * target_fs / fs) exactly.
    """
    if target_fs == x.fs:
        return RawSignal(x.samples.copy(), target_fs, dict(x.meta))
    # exact rational up/down from the two rates scaled to mHz
    up_raw, down_raw = int(round(target_fs * 1000)), int(round(x.fs * 1000))
    g = gcd(up_raw, down_raw)
    up, down = up_raw // g, down_raw // g
    h = _resample_filter(up, down)
    y = signal.resample_poly(x.samples, up, down, window=h)
    n_target = int(round(len(x.samples) * target_fs / x.fs))
    if len(y) > n_target:
        y = y[:n_target]
    elif len(y) < n_target:
        y = np.concatenate([y, np.zeros(n_target - len(y))])
    return RawSignal(y, target_fs, dict(x.meta))


@dataclass(frozen=True)
class ScaleStats:
    """Per-database scale factor: mean of per-signal standard deviations."""

    scale: float

    def __post_init__(self):
        if not np.isfinite(self.scale) or self.scale <= 0:
            raise ScaleError(f"scale must be finite and positive, got {self.scale}")


def compute_scale(training_signals) -> ScaleStats:
    """Mean of per-signal sample standard deviations over the training split.

    Accepts RawSignal objects or bare arrays. Must be fed training-split
    signals of a single database only.
    """
    stds = [float(np.std(s.samples if isinstance(s, RawSignal) else np.asarray(s)))
            for s in training_signals]
    if not stds:
        raise ScaleError("empty training split")
    return ScaleStats(float(np.mean(stds)))


def apply_scale(x: RawSignal, stats: ScaleStats) -> RawSignal:
    return RawSignal(x.samples / stats.scale, x.fs, dict(x.meta))


def preprocess(x: RawSignal, stats: ScaleStats | None = None,
               low: float = BAND_LOW, high: float = BAND_HIGH,
               target_fs: float = TARGET_FS) -> RawSignal:
    """Full conditioning pipeline: band-pass, resample, scale."""
    y = bandpass_zero_phase(x, low, high)
    y = resample(y, target_fs)
    if stats is not None:
        y = apply_scale(y, stats)
    return y
