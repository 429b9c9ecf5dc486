"""
Receiver chain: ambiguity-based channel estimation, the crystallization
check and GDAFT parameter search, MMSE detection and 4-QAM mapping.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Tuple

import numpy as np
import scipy.linalg as sla

from .ambiguity import ambiguity_rows, pulsone_lattice, spread_lattice
from .channel import EffectiveChannel, SupportRegion
from .errors import InvalidParams, SingularSystem
from .gdaft import GdaftParams
from .numtheory import gcd
from .zak import BASES, DDGrid

# Gray-mapped 4-QAM: first bit picks the sign of I, second the sign of Q
QAM4 = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / np.sqrt(2)


def qam_map(bits) -> np.ndarray:
    """Map an even-length bit array to unit-energy 4-QAM symbols; ``00 -> (1+1j)/sqrt(2)``."""
    bits = np.asarray(bits, dtype=np.int8).reshape(-1)
    if bits.size % 2:
        raise ValueError("4-QAM needs an even number of bits")
    b = bits.reshape(-1, 2)
    return QAM4[2 * b[:, 0] + b[:, 1]]


def qam_demap(symbols) -> np.ndarray:
    """Minimum-distance hard decisions back to bits."""
    s = np.asarray(symbols).reshape(-1)
    out = np.empty((s.size, 2), dtype=np.int8)
    out[:, 0] = s.real < 0
    out[:, 1] = s.imag < 0
    return out.reshape(-1)


@dataclass
class ChannelEstimate(EffectiveChannel):
    pilot: Tuple[int, int] = (0, 0)
    basis: str = "pulsone"


def estimate_channel(y_pilot: np.ndarray, pilot_waveform: np.ndarray, support: SupportRegion,
                     pilot: Tuple[int, int] = (0, 0), basis: str = "pulsone") -> ChannelEstimate:
    """
    ``h[k, l] = A_{y, x}[k, l] / A_x[0, 0]`` on the support.

    ``pilot_waveform`` is the transmitted pilot signal (with its amplitude),
    so the estimate is scale-correct for any pilot power.
    """
    x = np.asarray(pilot_waveform, dtype=np.complex128)
    L = x.size
    rows = ambiguity_rows(y_pilot, x, support.delays)
    peak = np.vdot(x, x).real / L
    taps = rows[:, support.dopplers % L] / peak
    return ChannelEstimate(taps, support, pilot=pilot, basis=basis)


@dataclass
class Crystallization:
    """Outcome of :func:`crystallization_check`; truthy iff it passed."""

    passed: bool
    witness: Optional[dict] = None
    translates_checked: int = 0

    def __bool__(self):
        return self.passed


def lattice(grid: DDGrid, basis: str, params: Optional[GdaftParams] = None) -> np.ndarray:
    """Aliasing lattice of the self-ambiguity, rows ``(k', l')`` mod MN; row 0 is the origin."""
    if basis == "pulsone":
        return pulsone_lattice(grid)
    if basis == "spread":
        if params is None:
            raise InvalidParams("spread basis needs GDAFT parameters")
        return spread_lattice(grid, params)
    raise InvalidParams(f"unknown basis {basis!r}")


def crystallization_check(support: SupportRegion, grid: DDGrid, basis: str = "pulsone",
                          params: Optional[GdaftParams] = None) -> Crystallization:
    """
    Check that ``S`` and ``S + v`` never meet (mod MN) for nonzero lattice ``v``.

    On failure the witness holds the lattice index ``(n, m)``, the offset
    ``v`` and one point of ``S`` that also lies in ``S + v``.
    """
    L = grid.size
    nk, nl = support.shape
    pts = lattice(grid, basis, params)
    M = grid.M
    for idx in range(1, pts.shape[0]):
        vk, vl = int(pts[idx, 0]), int(pts[idx, 1])
        # signed representative in [-(n-1), L-n]
        dk = (vk + nk - 1) % L - (nk - 1)
        dl = (vl + nl - 1) % L - (nl - 1)
        if dk <= nk - 1 and dl <= nl - 1:
            k = support.k_min + max(dk, 0)
            l = support.l_min + max(dl, 0)
            n_, m_ = divmod(idx, M)
            return Crystallization(False, {
                "translate": (n_, m_),
                "offset": (vk, vl),
                "point": (k, l),
                "source": (k - dk, l - dl),
            }, idx)
    return Crystallization(True, None, pts.shape[0] - 1)


def search_gdaft_params(grid: DDGrid, support: SupportRegion,
                        bounds: Iterable[Tuple[int, int]] = ((1, 10), (1, 10), (1, 10))) -> List[GdaftParams]:
    """All ``(A, B, C)`` in the inclusive bounds, co-prime to MN, for which the support crystallizes."""
    L = grid.size
    ranges = [range(max(1, lo), hi + 1) for lo, hi in bounds]
    ok = [[v for v in r if gcd(v, L) == 1] for r in ranges]
    found = []
    for A, B, C in itertools.product(*ok):
        p = GdaftParams(A, B, C)
        if crystallization_check(support, grid, "spread", p):
            found.append(p)
    return found


def mmse_detect(y: np.ndarray, H: np.ndarray, noise_var: float, gram: np.ndarray = None) -> np.ndarray:
    """
    ``(H^H H + s2 I)^{-1} H^H y`` by a Cholesky solve.

    ``y`` may hold several received vectors as columns. ``gram`` lets a
    caller reuse ``H^H H`` across noise levels.

    Raises
    ------
    SingularSystem
        If ``noise_var == 0`` and ``H`` is (numerically) rank deficient.
    """
    if noise_var < 0:
        raise InvalidParams("noise variance must be non-negative")
    H = np.asarray(H, dtype=np.complex128)
    G = H.conj().T @ H if gram is None else gram
    R = G + noise_var * np.eye(G.shape[0])
    rhs = H.conj().T @ y
    with warnings.catch_warnings():
        # sigma^2 > 0 keeps the system positive definite; only the zero-forcing limit can be singular
        warnings.simplefilter("error" if noise_var == 0 else "ignore", sla.LinAlgWarning)
        try:
            return sla.solve(R, rhs, assume_a="pos", check_finite=False)
        except (np.linalg.LinAlgError, sla.LinAlgWarning) as exc:
            raise SingularSystem(f"MMSE system is singular: {exc}") from None


def default_pilot(grid: DDGrid) -> Tuple[int, int]:
    return (grid.M // 2, grid.N // 2)


def check_basis(basis: str) -> None:
    if basis not in BASES:
        raise InvalidParams(f"unknown basis {basis!r}")
