"""
Doubly-selective channel: Veh-A paths, time-domain application with
band-limited periodic interpolation, the discrete delay-Doppler spreading
function, and the Zak-OTFS channel matrix.

A path ``(h, tau, nu)`` acts on a period of ``L`` samples at rate ``B`` as

    y[n] = h * exp(j2pi nu (n/B - tau)) * x~(n/B - tau)

where ``x~`` is the Dirichlet (periodic sinc) interpolation of ``x``. This
is sinc transmit shaping, the delta path and the sinc matched filter
sampled at rate ``B``.

Delay-Doppler taps use the shift operators
``(D_{k,l} x)[n] = x[n-k] exp(j2pi l (n-k) / L)``; every ``L x L`` operator
is ``sum_{k,l} c[k,l] D_{k,l}`` for a unique spreading function ``c``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, Tuple

import numpy as np

from .errors import InvalidConfig, SupportMismatch, SupportTooLarge
from .rng import as_generator
from .zak import DDGrid

VEH_A_DELAYS_US = (0.0, 0.31, 0.71, 1.09, 1.73, 2.51)
VEH_A_POWERS_DB = (0.0, -1.0, -9.0, -10.0, -15.0, -20.0)
VEH_A_NU_MAX = 815.0


@dataclass
class PathChannel:
    """Physical paths: complex gains, delays (s) and Dopplers (Hz)."""

    gains: np.ndarray
    delays: np.ndarray
    dopplers: np.ndarray

    def __post_init__(self):
        self.gains = np.atleast_1d(np.asarray(self.gains, dtype=np.complex128))
        self.delays = np.atleast_1d(np.asarray(self.delays, dtype=float))
        self.dopplers = np.atleast_1d(np.asarray(self.dopplers, dtype=float))
        if not (self.gains.shape == self.delays.shape == self.dopplers.shape) or self.gains.ndim != 1:
            raise InvalidConfig("gains, delays and dopplers must be equal-length 1-D")
        if self.gains.size < 1:
            raise InvalidConfig("a channel needs at least one path")
        if np.any(self.delays < 0):
            raise InvalidConfig("path delays must be non-negative")

    @classmethod
    def single(cls, gain: complex = 1.0, delay: float = 0.0, doppler: float = 0.0) -> "PathChannel":
        return cls([gain], [delay], [doppler])

    @property
    def num_paths(self) -> int:
        return self.gains.size

    @property
    def max_delay(self) -> float:
        return float(self.delays.max())

    @property
    def max_doppler(self) -> float:
        return float(np.abs(self.dopplers).max())

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["gain_re", "gain_im", "delay_s", "doppler_hz"])
            for h, t, v in zip(self.gains, self.delays, self.dopplers):
                w.writerow([repr(float(h.real)), repr(float(h.imag)), repr(float(t)), repr(float(v))])

    @classmethod
    def from_csv(cls, path) -> "PathChannel":
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        return cls(
            [complex(float(r["gain_re"]), float(r["gain_im"])) for r in rows],
            [float(r["delay_s"]) for r in rows],
            [float(r["doppler_hz"]) for r in rows],
        )


def veh_a_powers() -> np.ndarray:
    """Linear Veh-A path powers normalized to unit sum."""
    p = 10.0 ** (np.asarray(VEH_A_POWERS_DB) / 10.0)
    return p / p.sum()


def sample_veh_a(rng=None, nu_max: float = VEH_A_NU_MAX, fading: str = "rayleigh") -> PathChannel:
    """
    Draw a Veh-A realization.

    Path ``i`` has mean power ``p_i`` from the normalized power-delay
    profile: ``fading="rayleigh"`` draws ``h_i ~ CN(0, p_i)``, ``"fixed"``
    uses ``|h_i| = sqrt(p_i)`` with a uniform phase. Each Doppler is
    ``nu_max * cos(theta)`` with ``theta`` uniform on ``[-pi, pi)``.
    """
    rng = as_generator(rng)
    P = len(VEH_A_DELAYS_US)
    if fading == "rayleigh":
        g = rng.standard_normal((P, 2))
        unit = (g[:, 0] + 1j * g[:, 1]) / np.sqrt(2)
    elif fading == "fixed":
        unit = np.exp(1j * rng.uniform(0.0, 2 * np.pi, P))
    else:
        raise InvalidConfig(f"unknown fading model {fading!r}")
    theta = rng.uniform(-np.pi, np.pi, P)
    gains = np.sqrt(veh_a_powers()) * unit
    return PathChannel(gains, np.asarray(VEH_A_DELAYS_US) * 1e-6, nu_max * np.cos(theta))


def validate_channel(grid: DDGrid, max_delay: float, max_doppler: float) -> None:
    """Delay spread below the delay period and Doppler spread below the Doppler period."""
    if max_delay >= grid.tau_p:
        raise InvalidConfig(
            f"delay spread {max_delay:g} s is not below the delay period {grid.tau_p:g} s"
        )
    if 2 * max_doppler >= grid.nu_p:
        raise InvalidConfig(
            f"Doppler spread 2*{max_doppler:g} Hz is not below the Doppler period {grid.nu_p:g} Hz"
        )


def _symmetric_freqs(L: int) -> np.ndarray:
    return np.fft.fftfreq(L, d=1.0 / L)


def fractional_shift(x: np.ndarray, shift: float) -> np.ndarray:
    """
    Periodic band-limited delay by ``shift`` samples along axis 0.

    For even lengths the Nyquist bin is split symmetrically, which keeps the
    interpolation the real-symmetric Dirichlet kernel.
    """
    x = np.asarray(x, dtype=np.complex128)
    L = x.shape[0]
    f = _symmetric_freqs(L)
    ramp = np.exp(-2j * np.pi * f * shift / L)
    if L % 2 == 0:
        ramp[L // 2] = math.cos(math.pi * shift)
    shape = (L,) + (1,) * (x.ndim - 1)
    return np.fft.ifft(np.fft.fft(x, axis=0) * ramp.reshape(shape), axis=0)


def dirichlet(u, L: int) -> np.ndarray:
    """Periodic sinc: the impulse response of :func:`fractional_shift`, at offset ``u``."""
    u = np.asarray(u, dtype=float)
    f = _symmetric_freqs(L)
    w = np.ones(L)
    if L % 2 == 0:
        f = f.copy()
        f[L // 2] = 0.0
        w[L // 2] = 0.0
    val = (np.exp(2j * np.pi * np.multiply.outer(u, f) / L) * w).sum(axis=-1) / L
    if L % 2 == 0:
        val = val + np.cos(np.pi * u) / L
    return val


def apply_channel(x: np.ndarray, ch: PathChannel, grid: DDGrid = None, rate: float = None) -> np.ndarray:
    """
    Pass ``x`` (1-D, or columns of a 2-D array) through the paths. No noise.

    The period is ``x.shape[0]`` samples at ``rate`` (default the grid
    bandwidth). Delays and Dopplers wrap modulo the period.
    """
    x = np.asarray(x, dtype=np.complex128)
    if rate is None:
        if grid is None:
            raise InvalidConfig("apply_channel needs a grid or a sample rate")
        rate = grid.bandwidth
    L = x.shape[0]
    t = np.arange(L) / rate
    shape = (L,) + (1,) * (x.ndim - 1)
    y = np.zeros_like(x)
    for h, tau, nu in zip(ch.gains, ch.delays, ch.dopplers):
        shifted = fractional_shift(x, tau * rate)
        y += (h * np.exp(2j * np.pi * nu * (t - tau))).reshape(shape) * shifted
    return y


def channel_operator(ch: PathChannel, grid: DDGrid = None, length: int = None, rate: float = None) -> np.ndarray:
    """Dense time-domain matrix of :func:`apply_channel`."""
    if length is None:
        length = grid.size
    return apply_channel(np.eye(length, dtype=np.complex128), ch, grid, rate)


def spreading_function(ch: PathChannel, grid: DDGrid) -> np.ndarray:
    """
    Exact discrete DD spreading function ``c[k mod L, l mod L]`` of the channel.

    Per path: ``h * D(k - B tau) * G(nu T - l) * exp(-j2pi nu tau) * exp(j2pi l k / L)``
    with ``D`` the Dirichlet kernel and ``G(v) = (1/L) sum_n exp(j2pi v n / L)``.
    """
    L = grid.size
    k = np.arange(L)
    c = np.zeros((L, L), dtype=np.complex128)
    twist = np.exp(2j * np.pi * (np.outer(k, k) % L) / L)
    for h, tau, nu in zip(ch.gains, ch.delays, ch.dopplers):
        dk = dirichlet(k - tau * grid.bandwidth, L)
        gl = _geometric(nu * grid.duration - k, L)
        c += h * np.exp(-2j * np.pi * nu * tau) * np.outer(dk, gl)
    return c * twist


def _geometric(v: np.ndarray, L: int) -> np.ndarray:
    # (1/L) sum_{n<L} exp(j2pi v n / L), exact at integer v
    v = np.asarray(v, dtype=float)
    s = np.sin(np.pi * v / L)
    out = np.empty(v.shape, dtype=np.complex128)
    small = np.abs(s) < 1e-12
    vs = v[~small]
    out[~small] = np.exp(1j * np.pi * vs * (L - 1) / L) * np.sin(np.pi * vs) / (L * s[~small])
    # v ≡ 0 mod L
    out[small] = np.exp(1j * np.pi * v[small] * (L - 1) / L) * np.cos(np.pi * v[small]) / np.cos(np.pi * v[small] / L)
    return out


@dataclass(frozen=True)
class SupportRegion:
    """Rectangle ``[k_min, k_max] x [l_min, l_max]`` of delay/Doppler taps."""

    k_min: int
    k_max: int
    l_min: int
    l_max: int

    def __post_init__(self):
        if self.k_min > self.k_max or self.l_min > self.l_max:
            raise InvalidConfig(f"empty support region {self}")

    @property
    def delays(self) -> np.ndarray:
        return np.arange(self.k_min, self.k_max + 1)

    @property
    def dopplers(self) -> np.ndarray:
        return np.arange(self.l_min, self.l_max + 1)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.k_max - self.k_min + 1, self.l_max - self.l_min + 1)

    def __len__(self) -> int:
        a, b = self.shape
        return a * b

    def __contains__(self, kl) -> bool:
        k, l = kl
        return self.k_min <= k <= self.k_max and self.l_min <= l <= self.l_max

    def points(self) -> Iterator[Tuple[int, int]]:
        for k in self.delays:
            for l in self.dopplers:
                yield int(k), int(l)

    def validate(self, grid: DDGrid) -> None:
        nk, nl = self.shape
        if nk >= grid.M:
            raise SupportTooLarge(f"delay extent {nk} must be below M = {grid.M}")
        if nl >= grid.size:
            raise SupportTooLarge(f"Doppler extent {nl} must be below MN = {grid.size}")


NARROWBAND_SUPPORT = SupportRegion(-2, 8, -9, 9)


@dataclass
class EffectiveChannel:
    """Discrete DD taps on a support region; ``taps[i, j]`` is tap ``(k_min+i, l_min+j)``."""

    taps: np.ndarray
    support: SupportRegion
    meta: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        self.taps = np.asarray(self.taps, dtype=np.complex128)
        if self.taps.shape != self.support.shape:
            raise SupportMismatch(f"taps shape {self.taps.shape} != support shape {self.support.shape}")

    def __getitem__(self, kl) -> complex:
        k, l = kl
        if (k, l) not in self.support:
            return 0j
        return complex(self.taps[k - self.support.k_min, l - self.support.l_min])

    def items(self) -> Iterator[Tuple[Tuple[int, int], complex]]:
        for k, l in self.support.points():
            yield (k, l), self[k, l]

    def as_dict(self) -> Dict[Tuple[int, int], complex]:
        return dict(self.items())

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.taps) ** 2))

    @classmethod
    def from_dict(cls, taps: Dict[Tuple[int, int], complex], support: SupportRegion) -> "EffectiveChannel":
        arr = np.zeros(support.shape, dtype=np.complex128)
        for (k, l), v in taps.items():
            if (k, l) not in support:
                raise SupportMismatch(f"tap {(k, l)} outside {support}")
            arr[k - support.k_min, l - support.l_min] = v
        return cls(arr, support)


def effective_taps(ch: PathChannel, grid: DDGrid, support: SupportRegion) -> EffectiveChannel:
    """Ground-truth DD taps of ``ch`` restricted to ``support``."""
    support.validate(grid)
    c = spreading_function(ch, grid)
    L = grid.size
    taps = c[np.ix_(support.delays % L, support.dopplers % L)]
    return EffectiveChannel(taps, support)


def support_energy_fraction(ch: PathChannel, grid: DDGrid, support: SupportRegion) -> float:
    """Share of the spreading-function energy that falls inside ``support``."""
    c = spreading_function(ch, grid)
    L = grid.size
    inside = c[np.ix_(support.delays % L, support.dopplers % L)]
    return float(np.sum(np.abs(inside) ** 2) / np.sum(np.abs(c) ** 2))


def channel_matrix(h: EffectiveChannel, basis: np.ndarray) -> np.ndarray:
    """
    ``H[:, j] = sum_{k,l} h[k,l] D_{k,l} basis[:, j]``.

    With ``basis`` the identity this is the DD operator itself; with a
    carrier synthesis matrix it is the matrix acting on symbol vectors.
    """
    basis = np.asarray(basis, dtype=np.complex128)
    L = basis.shape[0]
    n = np.arange(L)
    H = np.zeros_like(basis)
    ls = h.support.dopplers
    for i, k in enumerate(h.support.delays):
        row = h.taps[i]
        if not np.any(row):
            continue
        phase = np.exp(2j * np.pi * (np.outer((n - k) % L, ls % L) % L) / L) @ row
        H += phase[:, None] * np.roll(basis, k, axis=0)
    return H


def noise_variance(snr_db: float, signal_power: float = 1.0) -> float:
    """``signal_power / 10**(snr_db / 10)``; zero for infinite SNR."""
    if math.isinf(snr_db) and snr_db > 0:
        return 0.0
    return signal_power / 10.0 ** (snr_db / 10.0)


def add_noise(y: np.ndarray, snr_db: float, rng=None, signal_power: float = 1.0) -> np.ndarray:
    """Add circular complex Gaussian noise of variance ``noise_variance(snr_db, signal_power)``."""
    y = np.asarray(y, dtype=np.complex128)
    var = noise_variance(snr_db, signal_power)
    if var == 0.0:
        return y.copy()
    rng = as_generator(rng)
    w = rng.standard_normal(y.shape + (2,))
    return y + np.sqrt(var / 2) * (w[..., 0] + 1j * w[..., 1])
