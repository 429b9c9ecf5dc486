"""
Scenario configuration files.

A scenario is a TOML document tagged with ``schema = "zakotfs.scenario/1"``.
Loading parses and validates it in full (grid, GDAFT co-primality,
support bounds, channel spreads, crystallization for estimated-CSI runs),
so nothing is simulated from a configuration that would fail later.

Example
-------
>>> cfg = load_preset("fig4-ber")
>>> cfg.grid.M, cfg.grid.N
(17, 19)
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Optional, Tuple

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

import numpy as np

from .channel import (NARROWBAND_SUPPORT, VEH_A_DELAYS_US, VEH_A_NU_MAX, PathChannel, SupportRegion,
                      validate_channel)
from .errors import InvalidConfig, ZakOtfsError
from .gdaft import GdaftParams
from .rxchain import crystallization_check
from .simulate import SYSTEMS, ComparisonSetup, LinkSetup, PilotMode
from .zak import BASES, DDGrid

SCHEMA_ID = "zakotfs.scenario/1"
EXPERIMENTS = ("papr", "nmse", "ber", "comparison")
PRESETS = ("fig2-papr", "fig3-nmse", "fig4-ber", "fig5-comparison", "fig6-wideband")


@dataclass(frozen=True)
class ScenarioConfig:
    """A validated experiment description; build one with :func:`parse_config`."""

    name: str
    experiment: str
    grid: DDGrid
    params: Optional[GdaftParams]
    bases: Tuple[str, ...] = BASES
    profile: str = "veh-a"
    paths: Optional[Tuple[Tuple[complex, float, float], ...]] = None
    nu_max: float = VEH_A_NU_MAX
    fading: str = "rayleigh"
    support: SupportRegion = NARROWBAND_SUPPORT
    pilot: Tuple[int, int] = (8, 9)
    modes: Tuple[PilotMode, ...] = ("perfect",)
    snrs: Tuple[float, ...] = (0.0,)
    frames: int = 100
    constellation: str = "4qam"
    active: int = 9
    systems: Tuple[str, ...] = SYSTEMS
    oversample: int = 4
    ccdf_thresholds: Tuple[float, ...] = field(default_factory=tuple)
    seed: int = 0

    @property
    def max_delay(self) -> float:
        if self.paths is not None:
            return max(t for _, t, _ in self.paths)
        return VEH_A_DELAYS_US[-1] * 1e-6

    @property
    def max_doppler(self) -> float:
        if self.paths is not None:
            return max(abs(v) for _, _, v in self.paths)
        return self.nu_max

    def with_overrides(self, seed: Optional[int] = None, frames: Optional[int] = None) -> "ScenarioConfig":
        cfg = self
        if seed is not None:
            cfg = replace(cfg, seed=int(seed))
        if frames is not None:
            if frames < 1:
                raise InvalidConfig("frames must be at least 1")
            cfg = replace(cfg, frames=int(frames))
        return cfg

    def link_setup(self) -> LinkSetup:
        return LinkSetup(self.grid, self.params, self.snrs, self.bases, self.modes, self.support,
                         self.pilot, self.nu_max, None, self.seed, self.fading, self.paths)

    def comparison_setup(self) -> ComparisonSetup:
        return ComparisonSetup(self.grid, self.params, self.snrs, self.active, self.systems,
                               self.nu_max, self.max_delay, self.seed, self.fading, self.paths)


def _table(doc: dict, key: str) -> dict:
    val = doc.get(key, {})
    if not isinstance(val, dict):
        raise InvalidConfig(f"[{key}] must be a table")
    return val


def _need(tab: dict, key: str, where: str):
    if key not in tab:
        raise InvalidConfig(f"missing required key '{key}' in [{where}]")
    return tab[key]


def _int(v, what: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise InvalidConfig(f"{what} must be an integer, got {v!r}")
    return v


def _snr_list(tab: dict) -> Tuple[float, ...]:
    if "points" in tab:
        pts = tab["points"]
        if not isinstance(pts, list) or not pts:
            raise InvalidConfig("[snr] points must be a non-empty list of dB values")
        return tuple(float(p) for p in pts)
    start = float(_need(tab, "start", "snr"))
    stop = float(_need(tab, "stop", "snr"))
    step = float(tab.get("step", 1.0))
    if step <= 0 or stop < start:
        raise InvalidConfig("[snr] needs start <= stop and a positive step")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(float(np.round(start + i * step, 9)) for i in range(count))


def _modes(raw) -> Tuple[PilotMode, ...]:
    out = []
    for m in raw:
        if m in ("perfect", "equal"):
            out.append(m)
        elif isinstance(m, (int, float)) and not isinstance(m, bool):
            out.append(float(m))
        else:
            raise InvalidConfig(f"pilot mode {m!r} is not 'perfect', 'equal' or a pilot SNR in dB")
    if not out:
        raise InvalidConfig("at least one CSI mode is required")
    return tuple(out)


def _paths(raw) -> Tuple[Tuple[complex, float, float], ...]:
    if not isinstance(raw, list) or not raw:
        raise InvalidConfig("custom channel profile needs a non-empty 'paths' list")
    out = []
    for i, p in enumerate(raw):
        try:
            out.append((complex(float(p["gain_re"]), float(p.get("gain_im", 0.0))),
                        float(p["delay_s"]), float(p["doppler_hz"])))
        except (KeyError, TypeError, ValueError):
            raise InvalidConfig(f"channel path {i} needs gain_re, delay_s and doppler_hz") from None
    return tuple(out)


def parse_config(doc: dict) -> ScenarioConfig:
    """Build and validate a :class:`ScenarioConfig` from a parsed TOML document."""
    schema = doc.get("schema")
    if schema != SCHEMA_ID:
        raise InvalidConfig(f"unsupported schema {schema!r}; expected schema = \"{SCHEMA_ID}\"")
    experiment = doc.get("experiment")
    if experiment not in EXPERIMENTS:
        raise InvalidConfig(f"experiment must be one of {EXPERIMENTS}, got {experiment!r}")

    g = _table(doc, "grid")
    try:
        grid = DDGrid(_int(_need(g, "M", "grid"), "grid.M"), _int(_need(g, "N", "grid"), "grid.N"),
                      float(_need(g, "nu_p", "grid")))
    except ZakOtfsError as exc:
        raise InvalidConfig(f"[grid]: {exc}") from None

    bases = tuple(doc.get("bases", BASES))
    for b in bases:
        if b not in BASES:
            raise InvalidConfig(f"unknown basis {b!r}; choose from {BASES}")

    params = None
    gd = _table(doc, "gdaft")
    if gd:
        params = GdaftParams(*(_int(_need(gd, c, "gdaft"), f"gdaft.{c}") for c in "ABC"))
        try:
            params.validate(grid.size)
        except ZakOtfsError as exc:
            raise InvalidConfig(f"[gdaft]: {exc}") from None
    needs_spread = "spread" in bases or (experiment == "comparison" and "zak-spread" in doc.get("systems", SYSTEMS))
    if needs_spread and params is None:
        raise InvalidConfig("the spread basis needs a [gdaft] table with A, B, C")

    ch = _table(doc, "channel")
    profile = ch.get("profile", "veh-a")
    paths = None
    if profile == "custom":
        paths = _paths(ch.get("paths"))
        PathChannel(*zip(*paths))
    elif profile != "veh-a":
        raise InvalidConfig(f"channel profile must be 'veh-a' or 'custom', got {profile!r}")
    fading = ch.get("fading", "rayleigh")
    if fading not in ("rayleigh", "fixed"):
        raise InvalidConfig(f"channel fading must be 'rayleigh' or 'fixed', got {fading!r}")
    nu_max = float(ch.get("nu_max", VEH_A_NU_MAX))

    sup = _table(doc, "support")
    support = NARROWBAND_SUPPORT
    if sup:
        support = SupportRegion(*(_int(_need(sup, k, "support"), f"support.{k}")
                                  for k in ("k_min", "k_max", "l_min", "l_max")))

    pl = _table(doc, "pilot")
    pilot = (_int(pl.get("k", grid.M // 2), "pilot.k"), _int(pl.get("l", grid.N // 2), "pilot.l"))
    modes = _modes(pl.get("modes", ["perfect"]))

    snr_tab = _table(doc, "snr")
    snrs = _snr_list(snr_tab) if snr_tab else (0.0,)

    frames = _int(doc.get("frames", 100), "frames")
    seed = _int(doc.get("seed", 0), "seed")
    constellation = doc.get("constellation", "4qam")
    systems = tuple(doc.get("systems", SYSTEMS))
    for s in systems:
        if s not in SYSTEMS:
            raise InvalidConfig(f"unknown system {s!r}; choose from {SYSTEMS}")
    active = _int(doc.get("active_subcarriers", 9), "active_subcarriers")

    pp = _table(doc, "papr")
    oversample = _int(pp.get("oversample", 4), "papr.oversample")
    thresholds = tuple(float(t) for t in pp.get("thresholds", np.round(np.arange(4.0, 14.001, 0.1), 10)))

    cfg = ScenarioConfig(
        name=str(doc.get("name", experiment)), experiment=experiment, grid=grid, params=params,
        bases=bases, profile=profile, paths=paths, nu_max=nu_max, fading=fading, support=support,
        pilot=pilot, modes=modes, snrs=snrs, frames=frames, constellation=constellation,
        active=active, systems=systems, oversample=oversample, ccdf_thresholds=thresholds, seed=seed)
    validate(cfg)
    return cfg


def validate(cfg: ScenarioConfig) -> None:
    """
    Reject scenarios that would violate a precondition downstream.

    Raises
    ------
    InvalidConfig
        With a message naming the offending section.
    """
    g = cfg.grid
    if cfg.frames < 1:
        raise InvalidConfig("frames must be at least 1")
    if cfg.constellation != "4qam":
        raise InvalidConfig(f"only the 4qam constellation is supported, got {cfg.constellation!r}")
    if cfg.oversample < 1:
        raise InvalidConfig("[papr] oversample must be a positive integer")
    if not 1 <= cfg.active <= g.M:
        raise InvalidConfig(f"active_subcarriers L={cfg.active} must lie in [1, M={g.M}]")
    try:
        g.check_indices(*cfg.pilot)
    except ZakOtfsError as exc:
        raise InvalidConfig(f"[pilot]: {exc}") from None
    try:
        cfg.support.validate(g)
        validate_channel(g, cfg.max_delay, cfg.max_doppler)
    except ZakOtfsError as exc:
        raise InvalidConfig(f"[channel]/[support]: {exc}") from None
    if "spread" in cfg.bases and cfg.params is not None:
        try:
            cfg.params.validate_closed_form(g)
        except ZakOtfsError as exc:
            raise InvalidConfig(f"[gdaft]: {exc}") from None
    if cfg.experiment in ("nmse", "ber") and any(m != "perfect" for m in cfg.modes):
        for b in cfg.bases:
            res = crystallization_check(cfg.support, g, b, cfg.params if b == "spread" else None)
            if not res:
                w = res.witness
                raise InvalidConfig(
                    f"support {cfg.support} does not crystallize for the {b} basis: lattice translate "
                    f"{w['translate']} (offset {w['offset']}) maps {w['source']} onto {w['point']}; "
                    f"pick other GDAFT parameters (see the 'search' subcommand) or a smaller support")


def load_config(path) -> ScenarioConfig:
    """Parse and validate a scenario file."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError:
        raise InvalidConfig(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise InvalidConfig(f"{path}: {exc}") from None
    return parse_config(doc)


def preset_path(name: str):
    if name not in PRESETS:
        raise InvalidConfig(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
    return resources.files("zakotfs").joinpath("presets", f"{name}.toml")


def load_preset(name: str) -> ScenarioConfig:
    with resources.as_file(preset_path(name)) as p:
        return load_config(p)


def resolve(spec: str) -> ScenarioConfig:
    """A preset name or a path to a TOML file."""
    if spec in PRESETS:
        return load_preset(spec)
    return load_config(spec)
