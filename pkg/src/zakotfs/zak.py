"""
Delay-Doppler grid, the pulsone carrier and symbol mounting.

Time signals are plain complex ``ndarray`` objects holding one period of
``M*N`` samples at rate ``B = M * nu_p``; every index is taken modulo
``M*N``. Symbol frames are ``(M, N)`` arrays indexed ``[k0, l0]`` and the
flattened carrier index is ``k0 + l0 * M`` (column-major).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional, Tuple

import numpy as np

from .errors import GridMismatch, IndexOutOfRange, InvalidParams

Basis = Literal["pulsone", "spread"]
BASES: Tuple[str, ...] = ("pulsone", "spread")


@dataclass(frozen=True)
class DDGrid:
    """
    An ``M x N`` delay-Doppler grid with Doppler period ``nu_p`` (Hz).

    The delay period is ``1 / nu_p``, the bandwidth ``M * nu_p`` and the
    frame duration ``N / nu_p``.
    """

    M: int
    N: int
    nu_p: float

    def __post_init__(self):
        if self.M < 1 or self.N < 1 or self.M * self.N < 2:
            raise InvalidParams(f"grid needs M, N >= 1 and M*N > 1, got M={self.M}, N={self.N}")
        if not self.nu_p > 0:
            raise InvalidParams(f"nu_p must be positive, got {self.nu_p}")

    @property
    def size(self) -> int:
        return self.M * self.N

    @property
    def tau_p(self) -> float:
        return 1.0 / self.nu_p

    @property
    def bandwidth(self) -> float:
        return self.M * self.nu_p

    @property
    def duration(self) -> float:
        return self.N * self.tau_p

    @property
    def sample_period(self) -> float:
        return 1.0 / self.bandwidth

    @property
    def doppler_resolution(self) -> float:
        return self.nu_p / self.N

    def check_indices(self, k0: int, l0: int) -> None:
        if not (0 <= k0 < self.M and 0 <= l0 < self.N):
            raise IndexOutOfRange(
                f"(k0, l0) = ({k0}, {l0}) outside [0, {self.M}) x [0, {self.N})"
            )

    def check_signal(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.complex128)
        if x.shape[0] != self.size:
            raise GridMismatch(f"signal has {x.shape[0]} samples, grid needs {self.size}")
        return x

    def flat_index(self, k0: int, l0: int) -> int:
        return k0 + l0 * self.M


@dataclass
class SymbolFrame:
    """Information symbols ``X[k0, l0]`` together with the carrier basis."""

    X: np.ndarray
    basis: Basis = "pulsone"
    pilot: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.complex128)
        if self.X.ndim != 2:
            raise InvalidParams("symbol matrix must be 2-D (M x N)")
        if self.basis not in BASES:
            raise InvalidParams(f"unknown basis {self.basis!r}")
        if self.pilot is not None:
            kp, lp = self.pilot
            M, N = self.X.shape
            if not (0 <= kp < M and 0 <= lp < N):
                raise IndexOutOfRange(f"pilot {self.pilot} outside the {M}x{N} grid")

    @classmethod
    def pilot_frame(cls, grid: DDGrid, kp: int, lp: int, basis: Basis = "pulsone",
                    amplitude: complex = 1.0) -> "SymbolFrame":
        grid.check_indices(kp, lp)
        X = np.zeros((grid.M, grid.N), dtype=np.complex128)
        X[kp, lp] = amplitude
        return cls(X, basis, (kp, lp))


def pulsone(grid: DDGrid, k0: int, l0: int) -> np.ndarray:
    """
    One period of the pulsone carrier at DD bin ``(k0, l0)``.

    Sample ``k0 + d*M`` equals ``exp(j2pi d l0 / N) / sqrt(N)`` for
    ``d = 0..N-1``; every other sample is zero, so the carrier has unit energy.
    """
    grid.check_indices(k0, l0)
    M, N = grid.M, grid.N
    x = np.zeros(grid.size, dtype=np.complex128)
    d = np.arange(N)
    x[k0 + d * M] = np.exp(2j * np.pi * ((d * l0) % N) / N) / np.sqrt(N)
    return x


def pulsone_matrix(grid: DDGrid) -> np.ndarray:
    """Dense synthesis matrix whose column ``k0 + l0*M`` is ``pulsone(k0, l0)``."""
    P = np.empty((grid.size, grid.size), dtype=np.complex128)
    for l0 in range(grid.N):
        for k0 in range(grid.M):
            P[:, grid.flat_index(k0, l0)] = pulsone(grid, k0, l0)
    return P


def _check_frame(X: np.ndarray, grid: DDGrid) -> np.ndarray:
    X = np.asarray(X, dtype=np.complex128)
    if X.shape != (grid.M, grid.N):
        raise GridMismatch(f"symbol matrix shape {X.shape} != ({grid.M}, {grid.N})")
    return X


def mount_pulsone(X: np.ndarray, grid: DDGrid) -> np.ndarray:
    """Superpose pulsones weighted by ``X`` using an inverse DFT along Doppler."""
    X = _check_frame(X, grid)
    # row d of the (N, M) view holds samples k0 + d*M
    T = np.sqrt(grid.N) * np.fft.ifft(X, axis=1)
    return np.ascontiguousarray(T.T).reshape(-1)


def demount_pulsone(x: np.ndarray, grid: DDGrid) -> np.ndarray:
    x = grid.check_signal(x)
    T = x.reshape(grid.N, grid.M).T
    return np.fft.fft(T, axis=1) / np.sqrt(grid.N)


def mount_symbols(frame: SymbolFrame, grid: DDGrid, params=None) -> np.ndarray:
    """
    Time signal ``sum X[k0, l0] x_(k0, l0)`` for the frame's basis.

    For the spread basis ``params`` (a :class:`~zakotfs.gdaft.GdaftParams`)
    selects the transform; the result is the GDAFT of the pulsone mount.
    """
    x = mount_pulsone(frame.X, grid)
    if frame.basis == "spread":
        from .gdaft import gdaft_forward

        if params is None:
            raise InvalidParams("spread basis needs GDAFT parameters")
        x = gdaft_forward(x, params)
    return x


def demount_symbols(x: np.ndarray, basis: Basis, grid: DDGrid, params=None) -> np.ndarray:
    """Inner products of ``x`` with every basis carrier, as an ``(M, N)`` array."""
    x = grid.check_signal(x)
    if basis == "spread":
        from .gdaft import gdaft_inverse

        if params is None:
            raise InvalidParams("spread basis needs GDAFT parameters")
        x = gdaft_inverse(x, params)
    elif basis != "pulsone":
        raise InvalidParams(f"unknown basis {basis!r}")
    return demount_pulsone(x, grid)


def basis_matrix(grid: DDGrid, basis: Basis, params=None) -> np.ndarray:
    """Synthesis matrix with column ``k0 + l0*M`` holding carrier ``(k0, l0)``."""
    P = pulsone_matrix(grid)
    if basis == "pulsone":
        return P
    if basis != "spread":
        raise InvalidParams(f"unknown basis {basis!r}")
    from .gdaft import gdaft_forward

    if params is None:
        raise InvalidParams("spread basis needs GDAFT parameters")
    return gdaft_forward(P, params)
