"""PAPR and its CCDF, channel-estimation NMSE, and bit error rate."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .channel import EffectiveChannel
from .errors import LengthMismatch, SupportMismatch, ZeroSignal

NMSE_FLOOR_DB = -100.0

CSV_COLUMNS = ("metric", "scenario", "x", "y", "frames", "seed")


def oversample(x: np.ndarray, factor: int) -> np.ndarray:
    """
    Periodic band-limited interpolation by zero-padding the spectrum.

    The Nyquist bin of an even-length signal is split between the two
    band edges so the interpolant stays symmetric.
    """
    x = np.asarray(x, dtype=np.complex128)
    factor = int(factor)
    if factor < 1:
        raise ValueError("oversampling factor must be a positive integer")
    if factor == 1:
        return x.copy()
    K = x.size
    X = np.fft.fft(x)
    Y = np.zeros(K * factor, dtype=np.complex128)
    half = (K + 1) // 2
    Y[:half] = X[:half]
    Y[K * factor - (K - half):] = X[half:]
    if K % 2 == 0:
        nyq = X[K // 2] / 2
        Y[K // 2] = nyq
        Y[K * factor - K // 2] = nyq
    return np.fft.ifft(Y) * factor


def papr(x: np.ndarray, oversample_factor: int = 4) -> float:
    """Peak-to-average power ratio in dB of the band-limited oversampled signal."""
    y = oversample(x, oversample_factor)
    p = np.abs(y) ** 2
    mean = p.mean()
    if not mean > 0:
        raise ZeroSignal("PAPR of an all-zero signal is undefined")
    return float(10 * np.log10(p.max() / mean))


@dataclass
class CcdfCurve:
    """``P(PAPR > threshold)`` sampled at ``thresholds`` (dB)."""

    thresholds: np.ndarray
    probabilities: np.ndarray
    samples: np.ndarray = None

    @property
    def median(self) -> float:
        return float(np.median(self.samples))


def ccdf(values: Sequence[float], thresholds: Iterable[float]) -> CcdfCurve:
    """Empirical CCDF via a sorted search."""
    v = np.sort(np.asarray(values, dtype=float))
    t = np.asarray(list(thresholds), dtype=float)
    prob = 1.0 - np.searchsorted(v, t, side="right") / v.size
    return CcdfCurve(t, prob, v)


def ccdf_direct(values, thresholds) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    return np.array([(v > th).mean() for th in thresholds])


def papr_ccdf(generator: Callable[[np.random.Generator], np.ndarray], frames: int,
              oversample_factor: int = 4, seed: int = 0, thresholds=None) -> CcdfCurve:
    """
    Monte-Carlo PAPR distribution of ``generator(rng)`` over ``frames`` frames.

    Frame ``i`` draws from its own stream keyed by ``(seed, i)``.
    """
    from .rng import DATA, frame_rng

    vals = np.array([papr(generator(frame_rng(seed, i, DATA)), oversample_factor) for i in range(frames)])
    if thresholds is None:
        thresholds = np.arange(0.0, 14.01, 0.1)
    return ccdf(vals, thresholds)


def nmse(estimate: EffectiveChannel, truth: EffectiveChannel, floor_db: float = NMSE_FLOOR_DB) -> float:
    """``10 log10(sum |h_hat - h|^2 / sum |h|^2)`` on a common support."""
    if estimate.support != truth.support:
        raise SupportMismatch(f"supports differ: {estimate.support} vs {truth.support}")
    err = float(np.sum(np.abs(estimate.taps - truth.taps) ** 2))
    ref = truth.energy
    if err == 0.0:
        return floor_db
    if ref == 0.0:
        return math.inf
    return max(floor_db, 10 * math.log10(err / ref))


def ber(decided, true) -> float:
    decided = np.asarray(decided).reshape(-1)
    true = np.asarray(true).reshape(-1)
    if decided.size != true.size:
        raise LengthMismatch(f"{decided.size} decided bits vs {true.size} reference bits")
    if true.size == 0:
        raise LengthMismatch("empty bit streams")
    return float(np.count_nonzero(decided != true) / true.size)


def wilson_interval(errors: int, trials: int, z: float = 1.959963984540054):
    """Wilson score interval for a binomial proportion (95% by default)."""
    if trials <= 0:
        return (0.0, 1.0)
    p = errors / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if errors == 0 else max(0.0, centre - half)
    hi = 1.0 if errors == trials else min(1.0, centre + half)
    return (lo, hi)


def write_rows(rows, path) -> None:
    """Write metric rows (dicts keyed by :data:`CSV_COLUMNS`)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in rows:
            w.writerow([r[c] for c in CSV_COLUMNS])
