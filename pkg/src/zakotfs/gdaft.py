"""
Generalized discrete affine Fourier transform (GDAFT) and the spread
carrier basis it produces from pulsones.

The transform of a length-``L`` sequence (``L = M*N``) is

    y[n] = L**-0.5 * sum_m exp(j2pi (A n^2 + B n m + C m^2) / L) x[m]

with ``A``, ``B``, ``C`` co-prime to ``L``. Because ``B`` is a unit mod ``L``
the middle kernel is a row permutation of an inverse DFT, which gives an
``O(L log L)`` evaluation:

    y = chirp_A * permute_B(L * ifft(chirp_C * x)) / sqrt(L)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams
from .numtheory import gcd, jacobi, mod_inverse
from .zak import DDGrid

__all__ = [
    "GdaftParams",
    "chirp",
    "gdaft_forward",
    "gdaft_inverse",
    "gdaft_matrix",
    "SpreadCarrier",
    "spread_carrier",
    "zadoff_chu_form",
]


@dataclass(frozen=True)
class GdaftParams:
    """Integer triple ``(A, B, C)`` of the GDAFT kernel."""

    A: int
    B: int
    C: int

    def __post_init__(self):
        for name in ("A", "B", "C"):
            if int(getattr(self, name)) < 1:
                raise InvalidParams(f"GDAFT parameter {name} must be a positive integer")

    def as_tuple(self):
        return (self.A, self.B, self.C)

    def validate(self, length: int) -> None:
        """Require ``A``, ``B``, ``C`` co-prime to ``length``."""
        for name, v in zip("ABC", self.as_tuple()):
            g = gcd(v, length)
            if g != 1:
                raise InvalidParams(
                    f"GDAFT parameter {name}={v} is not co-prime to MN={length} (gcd {g})"
                )

    def validate_closed_form(self, grid: DDGrid) -> None:
        """Conditions for the Gauss-sum closed form of the spread carriers."""
        self.validate(grid.size)
        if grid.N % 2 == 0:
            raise InvalidParams(f"spread-carrier closed form needs odd N, got N={grid.N}")
        if grid.N > 1 and gcd(4 * self.C * grid.M, grid.N) != 1:
            raise InvalidParams(
                f"4*C*M = {4 * self.C * grid.M} must be co-prime to N = {grid.N}"
            )


def _residues(coef: int, n: np.ndarray, modulus: int) -> np.ndarray:
    # exact integer residue of coef * n^2 mod modulus
    return ((n * n) % modulus * (coef % modulus)) % modulus


def chirp(coef: int, length: int) -> np.ndarray:
    """``exp(j2pi coef n^2 / length)`` evaluated from exact residues."""
    n = np.arange(length, dtype=np.int64)
    return np.exp(2j * np.pi * _residues(coef, n, length) / length)


def _as_columns(x):
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim == 1:
        return x[:, None], True
    return x, False


def gdaft_forward(x: np.ndarray, p: GdaftParams) -> np.ndarray:
    """
    Forward GDAFT along axis 0 (1-D signals or a matrix of column signals).

    Raises
    ------
    InvalidParams
        If any of ``A``, ``B``, ``C`` shares a factor with the signal length.
    """
    X, flat = _as_columns(x)
    L = X.shape[0]
    p.validate(L)
    z = chirp(p.C, L)[:, None] * X
    w = np.fft.ifft(z, axis=0) * L
    rows = (p.B * np.arange(L, dtype=np.int64)) % L
    y = chirp(p.A, L)[:, None] * w[rows] / np.sqrt(L)
    return y[:, 0] if flat else y


def gdaft_inverse(y: np.ndarray, p: GdaftParams) -> np.ndarray:
    """Inverse (adjoint) GDAFT along axis 0."""
    Y, flat = _as_columns(y)
    L = Y.shape[0]
    p.validate(L)
    u = np.conj(chirp(p.A, L))[:, None] * Y
    # v[q] = u[B^-1 q] so that sum_n e^{-j2pi B n m / L} u[n] = fft(v)[m]
    binv = mod_inverse(p.B, L)
    v = u[(binv * np.arange(L, dtype=np.int64)) % L]
    x = np.conj(chirp(p.C, L))[:, None] * np.fft.fft(v, axis=0) / np.sqrt(L)
    return x[:, 0] if flat else x


def gdaft_matrix(length: int, p: GdaftParams) -> np.ndarray:
    """Dense ``U[n, m]``; O(L^2) memory, used as a reference."""
    p.validate(length)
    n = np.arange(length, dtype=np.int64)
    res = (
        _residues(p.A, n, length)[:, None]
        + (p.B * np.outer(n, n)) % length
        + _residues(p.C, n, length)[None, :]
    ) % length
    return np.exp(2j * np.pi * res / length) / np.sqrt(length)


class SpreadCarrier:
    """
    Closed-form CAZAC carriers for a grid and GDAFT parameters.

    Validity of the closed form (odd ``N``, ``gcd(4CM, N) = 1``, co-primality
    with ``MN``) is checked once here.
    """

    def __init__(self, grid: DDGrid, params: GdaftParams):
        params.validate_closed_form(grid)
        self.grid = grid
        self.params = params
        N = grid.N
        self._q = mod_inverse(4 * params.C * grid.M, N) if N > 1 else 0
        eps = 1.0 if N % 4 == 1 else 1j
        self._scale = eps * jacobi(params.C * grid.M, N) / np.sqrt(grid.size)

    def __call__(self, k0: int, l0: int) -> np.ndarray:
        g, (A, B, C) = self.grid, self.params.as_tuple()
        g.check_indices(k0, l0)
        L, N = g.size, g.N
        n = np.arange(L, dtype=np.int64)
        outer = (_residues(A, n, L) + (B * k0 % L) * n + C * k0 * k0) % L
        lin = (B * n + l0 + 2 * C * k0) % N
        inner = (self._q * ((lin * lin) % N)) % N
        return self._scale * np.exp(2j * np.pi * outer / L) * np.exp(-2j * np.pi * inner / N)

    def matrix(self) -> np.ndarray:
        g = self.grid
        S = np.empty((g.size, g.size), dtype=np.complex128)
        for l0 in range(g.N):
            for k0 in range(g.M):
                S[:, g.flat_index(k0, l0)] = self(k0, l0)
        return S


def spread_carrier(grid: DDGrid, p: GdaftParams, k0: int, l0: int) -> np.ndarray:
    """Spread carrier ``(k0, l0)``: the GDAFT image of ``pulsone(k0, l0)``."""
    return SpreadCarrier(grid, p)(k0, l0)


def zadoff_chu_form(grid: DDGrid, p: GdaftParams, k0: int, l0: int,
                    corrected: bool = True) -> np.ndarray:
    """
    Unit-modulus generalized Zadoff-Chu sequence
    ``exp(j2pi (u n(n+1)/2 + k n + gamma) / MN)`` matching the spread carrier
    up to a global unit-modulus constant (and the ``1/sqrt(MN)`` scale).

    With ``u = 2(A - c B^2)``, ``k = c (B^2 - 2 B l0) - A`` and
    ``gamma = -(k0 l0 + c l0^2)`` where ``c = (4C)^{-1} mod N``, the match
    holds for ``k0 = 0`` only. ``corrected=True`` adds the linear term
    ``B k0 (1 - 4CM (4CM)^{-1}_N)`` to ``k``, which restores it for every
    ``k0``.
    """
    p.validate_closed_form(grid)
    A, B, C = p.as_tuple()
    M, N, L = grid.M, grid.N, grid.size
    c = mod_inverse(4 * C, N) if N > 1 else 0
    q = mod_inverse(4 * C * M, N) if N > 1 else 0
    u = 2 * (A - c * B * B)
    k = c * (B * B - 2 * B * l0) - A
    if corrected:
        k += B * k0 * (1 - 4 * C * M * q)
    gamma = -(k0 * l0 + c * l0 * l0)
    n = np.arange(L, dtype=np.int64)
    res = ((u % L) * ((n * (n + 1) // 2) % L) + (k % L) * n + gamma) % L
    return np.exp(2j * np.pi * res / L)
