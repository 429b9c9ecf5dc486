"""
Monte-Carlo experiments: PAPR statistics, channel estimation NMSE, BER of
pulsone and spread Zak-OTFS, and the multicarrier comparison.

Each frame draws all randomness from streams keyed by
``(seed, frame, stream)`` and shares channel, bits and unit noise vectors
across bases, SNR points and systems. Per-frame results are reduced in
frame order, so totals do not depend on the worker count.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache, partial
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import rng as streams
from .baselines import (MulticarrierConfig, Modem, dft_s_ofdm_modem, ofdm_modem, otfs_modem,
                        system_matrix)
from .channel import (NARROWBAND_SUPPORT, PathChannel, SupportRegion, VEH_A_DELAYS_US, VEH_A_NU_MAX,
                      channel_matrix, channel_operator, effective_taps, noise_variance,
                      sample_veh_a)
from .gdaft import GdaftParams
from .metrics import papr, ccdf, wilson_interval
from .rxchain import estimate_channel, mmse_detect, qam_demap, qam_map
from .zak import DDGrid, basis_matrix

log = logging.getLogger(__name__)

PilotMode = Union[str, float]  # "perfect", "equal" or a fixed pilot SNR in dB


def scenario_name(mode: PilotMode) -> str:
    if mode in ("perfect", "equal"):
        return {"perfect": "perfect-csi", "equal": "equal-snr"}[mode]
    return f"pilot-{float(mode):g}db"


@lru_cache(maxsize=8)
def _synthesis(grid: DDGrid, basis: str, params: Optional[GdaftParams]) -> np.ndarray:
    S = basis_matrix(grid, basis, params)
    S.setflags(write=False)
    return S


def _unit_noise(rng: np.random.Generator, n: int) -> np.ndarray:
    w = rng.standard_normal((n, 2))
    return (w[:, 0] + 1j * w[:, 1]) / np.sqrt(2)


def active_symbols(grid: DDGrid, count: Optional[int], seed: int, frame: int) -> np.ndarray:
    """Sorted indices of the ``count`` randomly chosen active carriers (all when None)."""
    if count is None or count >= grid.size:
        return np.arange(grid.size)
    r = streams.frame_rng(seed, frame, streams.PLACEMENT)
    return np.sort(r.choice(grid.size, size=count, replace=False))


def map_frames(fn, frames, workers: int = 1, executor=None) -> list:
    """
    ``[fn(f) for f in frames]``, optionally across processes, kept in frame order.

    Pass a live ``executor`` to reuse one worker pool (and its cached
    bases) across several calls.
    """
    frames = list(frames)
    if executor is not None:
        return list(executor.map(fn, frames, chunksize=max(1, len(frames) // (4 * workers))))
    if workers <= 1 or len(frames) < 2:
        return [fn(f) for f in frames]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, frames, chunksize=max(1, len(frames) // (4 * workers))))


# ---------------------------------------------------------------- PAPR

def basis_element_papr(grid: DDGrid, basis: str, params: Optional[GdaftParams] = None,
                       oversample_factor: int = 4) -> np.ndarray:
    """PAPR (dB) of every carrier, indexed ``[k0 + l0*M]``."""
    S = _synthesis(grid, basis, params)
    return np.array([papr(S[:, j], oversample_factor) for j in range(grid.size)])


def data_papr(grid: DDGrid, params: GdaftParams, frames: int, seed: int = 0,
              oversample_factor: int = 4, bases=("pulsone", "spread")) -> Dict[str, np.ndarray]:
    """Per-frame PAPR of random full 4-QAM frames; frame ``i`` carries the same symbols in every basis."""
    out = {b: np.empty(frames) for b in bases}
    synth = {b: _synthesis(grid, b, params if b == "spread" else None) for b in bases}
    for f in range(frames):
        r = streams.frame_rng(seed, f, streams.DATA)
        s = qam_map(r.integers(0, 2, 2 * grid.size))
        for b in bases:
            out[b][f] = papr(synth[b] @ s, oversample_factor)
    return out


def papr_ccdf_curves(grid, params, frames, seed=0, oversample_factor=4, thresholds=None):
    vals = data_papr(grid, params, frames, seed, oversample_factor)
    if thresholds is None:
        thresholds = np.round(np.arange(4.0, 14.001, 0.1), 10)
    return {b: ccdf(v, thresholds) for b, v in vals.items()}


# ---------------------------------------------------------------- Zak-OTFS link

@dataclass(frozen=True)
class LinkSetup:
    """Everything a frame worker needs; hashable so bases are cached per process."""

    grid: DDGrid
    params: Optional[GdaftParams]
    snrs: Tuple[float, ...]
    bases: Tuple[str, ...] = ("pulsone", "spread")
    modes: Tuple[PilotMode, ...] = ("perfect",)
    support: SupportRegion = NARROWBAND_SUPPORT
    pilot: Tuple[int, int] = (8, 9)
    nu_max: float = VEH_A_NU_MAX
    active: Optional[int] = None
    seed: int = 0
    fading: str = "rayleigh"
    paths: Optional[Tuple[Tuple[complex, float, float], ...]] = None


def draw_channel(setup, f: int) -> PathChannel:
    """Fixed custom paths when configured, otherwise a fresh Veh-A draw for frame ``f``."""
    if setup.paths is not None:
        h, t, v = zip(*setup.paths)
        return PathChannel(h, t, v)
    return sample_veh_a(streams.frame_rng(setup.seed, f, streams.CHANNEL), setup.nu_max, setup.fading)


@dataclass
class LinkResult:
    setup: LinkSetup
    frames: int
    bit_errors: Dict[Tuple[str, str], np.ndarray] = field(default_factory=dict)
    bits: Dict[Tuple[str, str], np.ndarray] = field(default_factory=dict)
    nmse_err: Dict[Tuple[str, str], np.ndarray] = field(default_factory=dict)
    nmse_ref: Dict[Tuple[str, str], np.ndarray] = field(default_factory=dict)

    def ber(self, basis: str, mode: PilotMode) -> np.ndarray:
        key = (basis, scenario_name(mode))
        return self.bit_errors[key] / self.bits[key]

    def ber_interval(self, basis: str, mode: PilotMode):
        key = (basis, scenario_name(mode))
        return np.array([wilson_interval(int(e), int(n)) for e, n in zip(self.bit_errors[key], self.bits[key])])

    def nmse_db(self, basis: str, mode: PilotMode) -> np.ndarray:
        """Aggregate NMSE ``sum err / sum |h|^2`` over frames, per SNR."""
        key = (basis, scenario_name(mode))
        return 10 * np.log10(self.nmse_err[key] / self.nmse_ref[key])

    def accumulate(self, per_frame: list) -> None:
        nsnr = len(self.setup.snrs)
        for fr in per_frame:
            for key, (errs, n_err, n_ref) in fr["res"].items():
                if key not in self.bits:
                    self.bit_errors[key] = np.zeros(nsnr, dtype=np.int64)
                    self.bits[key] = np.zeros(nsnr, dtype=np.int64)
                    self.nmse_err[key] = np.zeros(nsnr)
                    self.nmse_ref[key] = np.zeros(nsnr)
                self.bit_errors[key] += errs
                self.bits[key] += fr["n_bits"]
                self.nmse_err[key] += n_err
                self.nmse_ref[key] += n_ref
            self.frames += 1


def _link_frame(setup: LinkSetup, f: int) -> dict:
    g, seed = setup.grid, setup.seed
    L = g.size
    ch = draw_channel(setup, f)
    Ht = channel_operator(ch, g)
    act = active_symbols(g, setup.active, seed, f)
    scale = np.sqrt(L / act.size)
    bits = streams.frame_rng(seed, f, streams.DATA).integers(0, 2, 2 * act.size)
    s_act = qam_map(bits) * scale
    wd = _unit_noise(streams.frame_rng(seed, f, streams.DATA_NOISE), L)
    wp = _unit_noise(streams.frame_rng(seed, f, streams.PILOT_NOISE), L)
    estimating = [m for m in setup.modes if m != "perfect"]
    truth = effective_taps(ch, g, setup.support) if estimating else None
    kp, lp = setup.pilot
    out = {}
    for basis in setup.bases:
        S = _synthesis(g, basis, setup.params if basis == "spread" else None)
        Ha = Ht @ S[:, act]
        y0 = Ha @ s_act
        xp = np.sqrt(L) * S[:, g.flat_index(kp, lp)]
        yp0 = Ht @ xp
        gram = Ha.conj().T @ Ha if "perfect" in setup.modes else None
        for mode in setup.modes:
            name = scenario_name(mode)
            errs = np.zeros(len(setup.snrs), dtype=np.int64)
            n_err = np.zeros(len(setup.snrs))
            n_ref = np.zeros(len(setup.snrs))
            for i, snr in enumerate(setup.snrs):
                var = noise_variance(snr)
                y = y0 + np.sqrt(var) * wd
                if mode == "perfect":
                    xh = mmse_detect(y, Ha, var, gram)
                else:
                    pvar = var if mode == "equal" else noise_variance(float(mode))
                    est = estimate_channel(yp0 + np.sqrt(pvar) * wp, xp, setup.support, (kp, lp), basis)
                    n_err[i] = np.sum(np.abs(est.taps - truth.taps) ** 2)
                    n_ref[i] = truth.energy
                    Hh = channel_matrix(est, S[:, act])
                    xh = mmse_detect(y, Hh, var)
                errs[i] = np.count_nonzero(qam_demap(xh) != bits)
            out[(basis, name)] = (errs, n_err, n_ref)
    return {"n_bits": bits.size, "res": out}


def run_link(setup: LinkSetup, frames: int, workers: int = 1) -> LinkResult:
    """Monte-Carlo BER (and NMSE for estimated-CSI modes) of Zak-OTFS."""
    result = LinkResult(setup, 0)
    result.accumulate(map_frames(link_frame_fn(setup), range(frames), workers))
    return result


def link_frame_fn(setup: LinkSetup):
    return partial(_link_frame, setup)


# ---------------------------------------------------------------- comparison

SYSTEMS = ("zak-pulsone", "zak-spread", "otfs", "ofdm", "dft-s-ofdm")


@dataclass(frozen=True)
class ComparisonSetup:
    grid: DDGrid
    params: GdaftParams
    snrs: Tuple[float, ...]
    active: int = 9
    systems: Tuple[str, ...] = SYSTEMS
    nu_max: float = VEH_A_NU_MAX
    tau_max: float = VEH_A_DELAYS_US[-1] * 1e-6
    seed: int = 0
    fading: str = "rayleigh"
    paths: Optional[Tuple[Tuple[complex, float, float], ...]] = None

    @property
    def mc(self) -> MulticarrierConfig:
        return MulticarrierConfig.for_channel(self.grid.M, self.grid.N, self.grid.nu_p,
                                              self.tau_max, self.active)


def _zak_modem(grid: DDGrid, basis: str, params) -> Modem:
    S = _synthesis(grid, basis, params if basis == "spread" else None)
    return Modem(f"zak-{basis}", (grid.M, grid.N), lambda X: S @ X.reshape(-1, order="F"),
                 lambda s: np.asarray(s).reshape(grid.M, grid.N, order="F"))


def _modem(setup: ComparisonSetup, name: str) -> Modem:
    if name == "zak-pulsone":
        return _zak_modem(setup.grid, "pulsone", None)
    if name == "zak-spread":
        return _zak_modem(setup.grid, "spread", setup.params)
    return {"otfs": otfs_modem, "ofdm": ofdm_modem, "dft-s-ofdm": dft_s_ofdm_modem}[name](setup.mc)


def _comparison_frame(setup: ComparisonSetup, f: int) -> dict:
    g, seed = setup.grid, setup.seed
    L = g.size
    n_act = setup.active * g.N
    ch = draw_channel(setup, f)
    bits = streams.frame_rng(seed, f, streams.DATA).integers(0, 2, 2 * n_act)
    s_act = qam_map(bits) * np.sqrt(L / n_act)
    w = _unit_noise(streams.frame_rng(seed, f, streams.DATA_NOISE), L)
    placement = active_symbols(g, n_act, seed, f)
    out = {}
    for name in setup.systems:
        modem = _modem(setup, name)
        cols = np.arange(n_act) if name == "dft-s-ofdm" else placement
        H = system_matrix(modem, ch, g.bandwidth, cols)
        y0 = H @ s_act
        gram = H.conj().T @ H
        errs = np.zeros(len(setup.snrs), dtype=np.int64)
        for i, snr in enumerate(setup.snrs):
            var = noise_variance(snr)
            xh = mmse_detect(y0 + np.sqrt(var) * w[:H.shape[0]], H, var, gram)
            errs[i] = np.count_nonzero(qam_demap(xh) != bits)
        out[name] = errs
    return {"n_bits": bits.size, "res": out}


def run_comparison(setup: ComparisonSetup, frames: int, workers: int = 1):
    """Perfect-CSI BER of every system; returns ``{system: (errors, bits)}`` per SNR."""
    tot = ComparisonResult(setup)
    tot.accumulate(map_frames(comparison_frame_fn(setup), range(frames), workers))
    return tot


def comparison_frame_fn(setup: ComparisonSetup):
    return partial(_comparison_frame, setup)


@dataclass
class ComparisonResult:
    """Perfect-CSI bit error counts per system and SNR."""

    setup: ComparisonSetup
    frames: int = 0
    bit_errors: Dict[str, np.ndarray] = field(default_factory=dict)
    bits: Dict[str, np.ndarray] = field(default_factory=dict)

    def accumulate(self, per_frame: list) -> None:
        nsnr = len(self.setup.snrs)
        for fr in per_frame:
            for name, errs in fr["res"].items():
                if name not in self.bits:
                    self.bit_errors[name] = np.zeros(nsnr, dtype=np.int64)
                    self.bits[name] = np.zeros(nsnr, dtype=np.int64)
                self.bit_errors[name] += errs
                self.bits[name] += fr["n_bits"]
            self.frames += 1

    def ber(self, system: str) -> np.ndarray:
        return self.bit_errors[system] / self.bits[system]

    def ber_interval(self, system: str) -> np.ndarray:
        return np.array([wilson_interval(int(e), int(n))
                         for e, n in zip(self.bit_errors[system], self.bits[system])])


def snr_gap_db(snrs: Sequence[float], ber_a: Sequence[float], ber_b: Sequence[float]) -> np.ndarray:
    """
    Horizontal distance (dB) between two BER curves at each BER level of curve ``a``.

    Curve ``b`` is interpolated in ``log10 BER`` versus SNR; levels outside
    ``b``'s range (or zero BER) give NaN.
    """
    snrs = np.asarray(snrs, dtype=float)
    la = np.log10(np.maximum(np.asarray(ber_a, dtype=float), 1e-300))
    lb = np.log10(np.maximum(np.asarray(ber_b, dtype=float), 1e-300))
    gaps = np.full(snrs.size, np.nan)
    ok_b = np.asarray(ber_b) > 0
    for i, (s, v) in enumerate(zip(snrs, la)):
        if not np.asarray(ber_a)[i] > 0:
            continue
        for j in range(snrs.size - 1):
            if not (ok_b[j] and ok_b[j + 1]):
                continue
            hi, lo = lb[j], lb[j + 1]
            if min(hi, lo) <= v <= max(hi, lo) and hi != lo:
                t = (v - hi) / (lo - hi)
                gaps[i] = snrs[j] + t * (snrs[j + 1] - snrs[j]) - s
                break
    return gaps
