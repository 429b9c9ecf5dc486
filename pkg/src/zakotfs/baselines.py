"""
Comparison waveforms on the same ``M x N`` resource grid: CP-OFDM,
DFT-spread-OFDM and multicarrier OTFS with one cyclic prefix per frame.

Every modulator takes a symbol array and returns a sample stream;
demodulators invert it exactly on an ideal channel. All transforms are
unitary so per-symbol energy maps to per-sample energy 1:1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import PathChannel, apply_channel
from .errors import InvalidConfig
from .rxchain import mmse_detect


@dataclass(frozen=True)
class MulticarrierConfig:
    """
    Frame layout for the multicarrier baselines.

    ``cp`` is in samples; use :meth:`for_channel` to size it as
    ``ceil(B * tau_max)``. ``active`` is the DFT-s-OFDM subcarrier count.
    """

    M: int
    N: int
    nu_p: float
    cp: int = 0
    active: int = 9
    first_subcarrier: int = 0

    def __post_init__(self):
        if self.cp < 0:
            raise InvalidConfig("cyclic prefix length must be non-negative")
        if not 1 <= self.active <= self.M:
            raise InvalidConfig(f"active subcarriers L={self.active} must lie in [1, M={self.M}]")
        if self.first_subcarrier < 0 or self.first_subcarrier + self.active > self.M:
            raise InvalidConfig("DFT-s-OFDM allocation does not fit in M subcarriers")

    @classmethod
    def for_channel(cls, M: int, N: int, nu_p: float, tau_max: float, active: int = 9) -> "MulticarrierConfig":
        bw = M * nu_p
        # guard the float product against landing a hair above an integer
        cp = math.ceil(round(bw * tau_max, 9))
        return cls(M, N, nu_p, cp, active)

    @property
    def bandwidth(self) -> float:
        return self.M * self.nu_p

    @property
    def ofdm_length(self) -> int:
        return self.N * (self.M + self.cp)

    @property
    def otfs_length(self) -> int:
        return self.M * self.N + self.cp


def _check(X, shape):
    X = np.asarray(X, dtype=np.complex128)
    if X.shape != shape:
        raise InvalidConfig(f"symbol array shape {X.shape} != {shape}")
    return X


def ofdm_modulate(X: np.ndarray, cfg: MulticarrierConfig) -> np.ndarray:
    """``X[m, n]`` on subcarrier ``m`` of OFDM symbol ``n``; CP prepended per symbol."""
    X = _check(X, (cfg.M, cfg.N))
    blocks = np.fft.ifft(X, axis=0, norm="ortho")
    if cfg.cp:
        blocks = np.concatenate([blocks[-cfg.cp:], blocks], axis=0)
    return blocks.T.reshape(-1)


def ofdm_demodulate(stream: np.ndarray, cfg: MulticarrierConfig) -> np.ndarray:
    s = np.asarray(stream).reshape(cfg.N, cfg.M + cfg.cp).T[cfg.cp:]
    return np.fft.fft(s, axis=0, norm="ortho")


def dft_s_ofdm_modulate(D: np.ndarray, cfg: MulticarrierConfig) -> np.ndarray:
    """``L``-point DFT precoding of each column of ``D`` onto ``L`` contiguous subcarriers."""
    D = _check(D, (cfg.active, cfg.N))
    X = np.zeros((cfg.M, cfg.N), dtype=np.complex128)
    s = cfg.first_subcarrier
    X[s:s + cfg.active] = np.fft.fft(D, axis=0, norm="ortho")
    return ofdm_modulate(X, cfg)


def dft_s_ofdm_demodulate(stream: np.ndarray, cfg: MulticarrierConfig) -> np.ndarray:
    X = ofdm_demodulate(stream, cfg)
    s = cfg.first_subcarrier
    return np.fft.ifft(X[s:s + cfg.active], axis=0, norm="ortho")


def isfft(X: np.ndarray) -> np.ndarray:
    """DD ``X[k, l]`` to TF ``X_tf[m, n]``: DFT along delay, inverse DFT along Doppler."""
    return np.fft.ifft(np.fft.fft(X, axis=0, norm="ortho"), axis=1, norm="ortho")


def sfft(X_tf: np.ndarray) -> np.ndarray:
    return np.fft.ifft(np.fft.fft(X_tf, axis=1, norm="ortho"), axis=0, norm="ortho")


def otfs_modulate(X: np.ndarray, cfg: MulticarrierConfig) -> np.ndarray:
    """ISFFT, rectangular-pulse OFDM without per-symbol CP, one CP for the frame."""
    X = _check(X, (cfg.M, cfg.N))
    blocks = np.fft.ifft(isfft(X), axis=0, norm="ortho")
    s = blocks.T.reshape(-1)
    if cfg.cp:
        s = np.concatenate([s[-cfg.cp:], s])
    return s


def otfs_demodulate(stream: np.ndarray, cfg: MulticarrierConfig) -> np.ndarray:
    s = np.asarray(stream)[cfg.cp:]
    blocks = s.reshape(cfg.N, cfg.M).T
    return sfft(np.fft.fft(blocks, axis=0, norm="ortho"))


class Modem:
    """A modulator/demodulator pair acting on flat symbol vectors."""

    def __init__(self, name, shape, modulate, demodulate):
        self.name = name
        self.shape = shape
        self._mod = modulate
        self._demod = demodulate

    @property
    def num_symbols(self) -> int:
        return self.shape[0] * self.shape[1]

    def modulate(self, s: np.ndarray) -> np.ndarray:
        return self._mod(np.asarray(s).reshape(self.shape, order="F"))

    def demodulate(self, stream: np.ndarray) -> np.ndarray:
        return self._demod(stream).reshape(-1, order="F")

    def synthesis(self, columns=None) -> np.ndarray:
        """Stream-domain matrix whose columns are the modulated unit symbols."""
        cols = range(self.num_symbols) if columns is None else columns
        out = []
        for j in cols:
            e = np.zeros(self.num_symbols, dtype=np.complex128)
            e[j] = 1
            out.append(self.modulate(e))
        return np.stack(out, axis=1)


def ofdm_modem(cfg: MulticarrierConfig) -> Modem:
    return Modem("ofdm", (cfg.M, cfg.N), lambda X: ofdm_modulate(X, cfg),
                 lambda s: ofdm_demodulate(s, cfg))


def dft_s_ofdm_modem(cfg: MulticarrierConfig) -> Modem:
    return Modem("dft-s-ofdm", (cfg.active, cfg.N), lambda D: dft_s_ofdm_modulate(D, cfg),
                 lambda s: dft_s_ofdm_demodulate(s, cfg))


def otfs_modem(cfg: MulticarrierConfig) -> Modem:
    return Modem("otfs", (cfg.M, cfg.N), lambda X: otfs_modulate(X, cfg),
                 lambda s: otfs_demodulate(s, cfg))


def system_matrix(modem: Modem, ch: PathChannel, rate: float, columns=None) -> np.ndarray:
    """
    Exact per-frame channel matrix from symbols to demodulated outputs.

    Each unit symbol is modulated, passed through :func:`apply_channel` at
    ``rate`` and demodulated (perfect CSI).
    """
    rx = apply_channel(modem.synthesis(columns), ch, rate=rate)
    return np.stack([modem.demodulate(rx[:, j]) for j in range(rx.shape[1])], axis=1)


def baseline_mmse_detect(received: np.ndarray, H: np.ndarray, noise_var: float) -> np.ndarray:
    """Linear MMSE on the exact matrix; identical contract to :func:`rxchain.mmse_detect`."""
    return mmse_detect(received, H, noise_var)
