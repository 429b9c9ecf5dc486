"""
Periodic cross-ambiguity functions on Z_L x Z_L (``L = M*N``).

    A_{y,x}[k, l] = (1/L) sum_n y[n] conj(x[n-k]) exp(-j2pi l (n-k) / L)

Surfaces are ``(L, L)`` arrays indexed ``[k mod L, l mod L]``.
"""

from __future__ import annotations

import csv
from typing import Iterable, Tuple

import numpy as np

from .errors import GridMismatch
from .gdaft import GdaftParams
from .numtheory import mod_inverse
from .zak import DDGrid


def _pair(y, x):
    y = np.asarray(y, dtype=np.complex128)
    x = np.asarray(x, dtype=np.complex128)
    if y.shape != x.shape or y.ndim != 1:
        raise GridMismatch(f"ambiguity needs equal-length 1-D signals, got {y.shape} and {x.shape}")
    return y, x


def cross_ambiguity(y: np.ndarray, x: np.ndarray, k: int, l: int) -> complex:
    """Single value ``A_{y,x}[k, l]`` by direct summation."""
    y, x = _pair(y, x)
    L = y.size
    m = (np.arange(L) - k) % L
    return complex(np.sum(y * np.conj(x[m]) * np.exp(-2j * np.pi * ((l * m) % L) / L)) / L)


def ambiguity_rows(y: np.ndarray, x: np.ndarray, ks: Iterable[int]) -> np.ndarray:
    """
    Rows ``A_{y,x}[k, :]`` for the delay lags ``ks``, one FFT per lag.

    Returns an array of shape ``(len(ks), L)``.
    """
    y, x = _pair(y, x)
    L = y.size
    ks = np.asarray(list(ks), dtype=np.int64) % L
    n = np.arange(L)
    prod = y[None, :] * np.conj(x[(n[None, :] - ks[:, None]) % L])
    # the phase reference is n - k, not n
    twist = np.exp(2j * np.pi * ((ks[:, None] * n[None, :]) % L) / L)
    return np.fft.fft(prod, axis=1) * twist / L


def ambiguity_surface(y: np.ndarray, x: np.ndarray = None) -> np.ndarray:
    """Full ``(L, L)`` cross-ambiguity surface; self-ambiguity when ``x`` is None."""
    if x is None:
        x = y
    return ambiguity_rows(y, x, range(np.asarray(y).size))


def transform_ambiguity_law(p: GdaftParams, length: int, k: int, l: int) -> Tuple[complex, int, int]:
    """
    How the GDAFT acts on cross-ambiguities.

    Returns ``(phase, k_bar, l_bar)`` such that
    ``A_{Uy,Ux}[k, l] = phase * A_{y,x}[k_bar, l_bar]`` for all ``y``, ``x``.
    """
    p.validate(length)
    L = length
    A, B, C = p.as_tuple()
    binv = mod_inverse(B, L)
    t = (2 * A * k - l) % L
    k_bar = (-binv * t) % L
    l_bar = (2 * C * binv * t - B * k) % L
    res = (-A * k * k + l * k + C * binv * binv * t * t) % L
    return complex(np.exp(2j * np.pi * res / L)), int(k_bar), int(l_bar)


def pulsone_lattice(grid: DDGrid) -> np.ndarray:
    """Self-ambiguity support of any pulsone: ``(n M, m N) mod MN``, shape ``(MN, 2)``."""
    M, N, L = grid.M, grid.N, grid.size
    n, m = np.meshgrid(np.arange(N), np.arange(M), indexing="ij")
    return np.stack([(n * M) % L, (m * N) % L], axis=-1).reshape(-1, 2)


def spread_lattice(grid: DDGrid, p: GdaftParams) -> np.ndarray:
    """
    Self-ambiguity support of every spread carrier, shape ``(MN, 2)``.

    Entry ``n*M + m`` is ``(k'_{n,m}, l'_{n,m}) mod MN`` with
    ``k' = -2 C B^-1 n M - B^-1 m N`` and ``l' = (B - 4 A C B^-1) n M - 2 A B^-1 m N``.
    """
    M, N, L = grid.M, grid.N, grid.size
    A, B, C = p.as_tuple()
    p.validate(L)
    binv = mod_inverse(B, L)
    n, m = np.meshgrid(np.arange(N), np.arange(M), indexing="ij")
    k = (-2 * C * binv * n * M - binv * m * N) % L
    l = ((B - 4 * A * C * binv) * n * M - 2 * A * binv * m * N) % L
    return np.stack([k, l], axis=-1).reshape(-1, 2)


def pulsone_self_ambiguity(grid: DDGrid, kp: int, lp: int) -> np.ndarray:
    """
    Closed-form self-ambiguity surface of ``pulsone(kp, lp)``.

    Nonzero only at ``(n M, m N)`` where it equals
    ``exp(j2pi n lp / N) exp(-j2pi m kp / M) / MN``.
    """
    grid.check_indices(kp, lp)
    M, N, L = grid.M, grid.N, grid.size
    S = np.zeros((L, L), dtype=np.complex128)
    for n in range(N):
        for m in range(M):
            S[n * M, m * N] = np.exp(2j * np.pi * (n * lp % N) / N) * np.exp(-2j * np.pi * (m * kp % M) / M) / L
    return S


def write_surface_csv(surface: np.ndarray, path, threshold: float = 0.0) -> int:
    """
    Dump ``|A[k, l]|`` as CSV rows ``k,l,magnitude``; returns the row count.

    Entries with magnitude ``<= threshold`` are skipped.
    """
    mag = np.abs(surface)
    rows = 0
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "l", "magnitude"])
        for k, l in zip(*np.nonzero(mag > threshold) if threshold > 0 else np.indices(mag.shape).reshape(2, -1)):
            w.writerow([int(k), int(l), repr(float(mag[k, l]))])
            rows += 1
    return rows
