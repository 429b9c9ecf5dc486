"""
Command-line interface.

Subcommands
-----------
waveform    write one carrier as an I/Q file and report its PAPR
check       crystallization check of a support region for one basis
search      GDAFT parameter triples that satisfy the crystallization check
simulate    run a scenario config (or preset) and write metric rows as CSV
papr-ccdf   PAPR CCDF of random 4-QAM frames for both bases

Exit status is 0 on success, 1 when ``check`` reports a failure (or a
simulation is interrupted) and 2 on invalid input.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Iterable, List, Optional

import numpy as np

from . import simulate as sim
from .channel import NARROWBAND_SUPPORT, SupportRegion
from .config import PRESETS, ScenarioConfig, resolve
from .errors import InvalidConfig, ZakOtfsError
from .gdaft import GdaftParams
from .iqfile import write_iq
from .metrics import CSV_COLUMNS, ccdf, papr
from .rxchain import crystallization_check, search_gdaft_params
from .zak import BASES, DDGrid

log = logging.getLogger("zakotfs")

CHUNK_FRAMES = 20


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


class RowWriter:
    """Streams metric rows to a file (or stdout) in the fixed CSV column order."""

    def __init__(self, path: Optional[str]):
        self._own = path not in (None, "-")
        self.fh = open(path, "w", newline="", encoding="utf-8") if self._own else sys.stdout
        self.w = csv.writer(self.fh, lineterminator="\n")
        self.w.writerow(CSV_COLUMNS)

    def row(self, metric, scenario, x, y, frames, seed):
        self.w.writerow([metric, scenario, _fmt(x), _fmt(y), int(frames), int(seed)])

    def close(self):
        self.fh.flush()
        if self._own:
            self.fh.close()


# ---------------------------------------------------------------- argument helpers

def _grid_args(p: argparse.ArgumentParser, abc: bool = True):
    p.add_argument("--M", type=int, default=17, help="delay bins (default 17)")
    p.add_argument("--N", type=int, default=19, help="Doppler bins (default 19)")
    p.add_argument("--nu-p", type=float, default=30e3, help="Doppler period in Hz (default 30e3)")
    if abc:
        p.add_argument("--A", type=int, default=3)
        p.add_argument("--B", type=int, default=5)
        p.add_argument("--C", type=int, default=7)


def _grid(args) -> DDGrid:
    return DDGrid(args.M, args.N, args.nu_p)


def _params(args, grid: DDGrid) -> GdaftParams:
    p = GdaftParams(args.A, args.B, args.C)
    p.validate(grid.size)
    return p


def _support(values) -> SupportRegion:
    if values is None:
        return NARROWBAND_SUPPORT
    return SupportRegion(*values)


def _bounds(text: str):
    try:
        parts = [tuple(int(v) for v in part.split(":")) for part in text.split(",")]
    except ValueError:
        raise InvalidConfig(f"bounds {text!r} must look like 1:10,1:10,1:10") from None
    if len(parts) != 3 or any(len(b) != 2 or b[0] > b[1] for b in parts):
        raise InvalidConfig(f"bounds {text!r} must be three lo:hi ranges with lo <= hi")
    return parts


# ---------------------------------------------------------------- subcommands

def cmd_waveform(args) -> int:
    grid = _grid(args)
    grid.check_indices(args.k0, args.l0)
    params = None
    if args.basis == "spread":
        params = _params(args, grid)
        from .gdaft import spread_carrier
        x = spread_carrier(grid, params, args.k0, args.l0)
    else:
        from .zak import pulsone
        x = pulsone(grid, args.k0, args.l0)
    header = {"M": grid.M, "N": grid.N, "nu_p": repr(grid.nu_p), "basis": args.basis,
              "k0": args.k0, "l0": args.l0}
    if params is not None:
        header.update(A=params.A, B=params.B, C=params.C)
    if args.out:
        write_iq(args.out, x, header)
        log.info("wrote %d samples to %s", x.size, args.out)
    print(f"PAPR {papr(x, args.oversample):.4f} dB ({args.basis} carrier ({args.k0}, {args.l0}), "
          f"{args.oversample}x oversampling, {x.size} samples)")
    return 0


def cmd_check(args) -> int:
    grid = _grid(args)
    support = _support(args.support)
    support.validate(grid)
    params = _params(args, grid) if args.basis == "spread" else None
    res = crystallization_check(support, grid, args.basis, params)
    what = f"{args.basis} basis" + (f" A={params.A} B={params.B} C={params.C}" if params else "")
    if res:
        print(f"PASS: support {support} crystallizes for the {what} "
              f"({res.translates_checked} lattice translates checked)")
        return 0
    w = res.witness
    print(f"FAIL: support {support} aliases for the {what}: lattice translate {w['translate']} "
          f"with offset {w['offset']} maps {w['source']} onto {w['point']}")
    return 1


def cmd_search(args) -> int:
    grid = _grid(args)
    support = _support(args.support)
    support.validate(grid)
    found = search_gdaft_params(grid, support, _bounds(args.bounds))
    fh = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("A", "B", "C"))
        for p in found:
            w.writerow(p.as_tuple())
    finally:
        if args.out:
            fh.close()
    log.info("%d feasible triples", len(found))
    return 0


def _papr_rows(cfg: ScenarioConfig, out: RowWriter, elements: bool = True) -> None:
    for b in cfg.bases:
        if elements:
            vals = sim.basis_element_papr(cfg.grid, b, cfg.params, cfg.oversample)
            for j, v in enumerate(vals):
                out.row("papr_element_db", f"{cfg.name}/{b}", j, v, 1, cfg.seed)
    data = sim.data_papr(cfg.grid, cfg.params, cfg.frames, cfg.seed, cfg.oversample, cfg.bases)
    for b in cfg.bases:
        curve = ccdf(data[b], cfg.ccdf_thresholds)
        out.row("papr_median_db", f"{cfg.name}/{b}", 0.5, curve.median, cfg.frames, cfg.seed)
        for t, pr in zip(curve.thresholds, curve.probabilities):
            out.row("papr_ccdf", f"{cfg.name}/{b}", t, pr, cfg.frames, cfg.seed)


def _chunks(frames: int, size: int) -> Iterable[range]:
    for start in range(0, frames, size):
        yield range(start, min(frames, start + size))


def _run_chunked(fn, result, cfg: ScenarioConfig, workers: int) -> bool:
    """Accumulate frames chunk by chunk; returns False if interrupted (partial result kept)."""
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    done = False
    try:
        for chunk in _chunks(cfg.frames, max(CHUNK_FRAMES, 4 * workers)):
            result.accumulate(sim.map_frames(fn, chunk, workers, pool))
            log.info("%s: %d/%d frames", cfg.name, result.frames, cfg.frames)
        done = True
    except KeyboardInterrupt:
        log.warning("interrupted after %d frames; writing partial results", result.frames)
    finally:
        if pool is not None:
            pool.shutdown(wait=done, cancel_futures=not done)
    return done


def _link_rows(cfg: ScenarioConfig, res: sim.LinkResult, out: RowWriter) -> None:
    for basis in cfg.bases:
        for mode in cfg.modes:
            scen = f"{cfg.name}/{basis}/{sim.scenario_name(mode)}"
            if mode != "perfect":
                for s, v in zip(cfg.snrs, res.nmse_db(basis, mode)):
                    out.row("nmse_db", scen, s, v, res.frames, cfg.seed)
            if cfg.experiment == "ber":
                key = (basis, sim.scenario_name(mode))
                ci = res.ber_interval(basis, mode)
                for i, s in enumerate(cfg.snrs):
                    out.row("ber", scen, s, res.ber(basis, mode)[i], res.frames, cfg.seed)
                    out.row("ber_ci_low", scen, s, ci[i, 0], res.frames, cfg.seed)
                    out.row("ber_ci_high", scen, s, ci[i, 1], res.frames, cfg.seed)
                    out.row("bit_errors", scen, s, res.bit_errors[key][i], res.frames, cfg.seed)


def _comparison_rows(cfg: ScenarioConfig, res: sim.ComparisonResult, out: RowWriter) -> None:
    for name in cfg.systems:
        scen = f"{cfg.name}/{name}"
        ci = res.ber_interval(name)
        for i, s in enumerate(cfg.snrs):
            out.row("ber", scen, s, res.ber(name)[i], res.frames, cfg.seed)
            out.row("ber_ci_low", scen, s, ci[i, 0], res.frames, cfg.seed)
            out.row("ber_ci_high", scen, s, ci[i, 1], res.frames, cfg.seed)
            out.row("bit_errors", scen, s, res.bit_errors[name][i], res.frames, cfg.seed)


def run_scenario(cfg: ScenarioConfig, out: RowWriter, workers: int = 1) -> bool:
    """Run ``cfg`` and write its rows; returns False if it was interrupted."""
    if cfg.experiment == "papr":
        _papr_rows(cfg, out)
        return True
    if cfg.experiment == "comparison":
        setup = cfg.comparison_setup()
        res = sim.ComparisonResult(setup)
        done = _run_chunked(sim.comparison_frame_fn(setup), res, cfg, workers)
        if res.frames:
            _comparison_rows(cfg, res, out)
        return done
    setup = cfg.link_setup()
    res = sim.LinkResult(setup, 0)
    done = _run_chunked(sim.link_frame_fn(setup), res, cfg, workers)
    if res.frames:
        _link_rows(cfg, res, out)
    return done


def _load(args) -> ScenarioConfig:
    if not args.config:
        raise InvalidConfig(f"--config is required (a TOML path or one of: {', '.join(PRESETS)})")
    return resolve(args.config).with_overrides(seed=args.seed, frames=args.frames)


def cmd_simulate(args) -> int:
    cfg = _load(args)
    out = RowWriter(args.out)
    try:
        done = run_scenario(cfg, out, max(1, args.workers))
    finally:
        out.close()
    return 0 if done else 1


def cmd_papr_ccdf(args) -> int:
    if args.config:
        cfg = _load(args)
    else:
        cfg = resolve("fig2-papr").with_overrides(seed=args.seed, frames=args.frames)
    if cfg.experiment != "papr":
        raise InvalidConfig(f"papr-ccdf needs a papr experiment config, got {cfg.experiment!r}")
    out = RowWriter(args.out)
    try:
        _papr_rows(cfg, out, elements=False)
    finally:
        out.close()
    return 0


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zakotfs", description="Zak-OTFS waveform and link-level tools")
    parser.add_argument("--verbose", "-v", action="count", default=0, help="log progress (repeat for debug)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("waveform", help="write one carrier as an I/Q file and print its PAPR")
    _grid_args(p)
    p.add_argument("--basis", choices=BASES, default="spread")
    p.add_argument("--k0", type=int, default=0)
    p.add_argument("--l0", type=int, default=0)
    p.add_argument("--oversample", type=int, default=4)
    p.add_argument("--out", help="I/Q output path (omit to only print the PAPR)")
    p.set_defaults(func=cmd_waveform)

    for name, func, helptext in (("check", cmd_check, "crystallization check for one basis"),
                                 ("search", cmd_search, "list GDAFT triples that crystallize")):
        p = sub.add_parser(name, help=helptext)
        _grid_args(p, abc=(name == "check"))
        p.add_argument("--support", type=int, nargs=4, metavar=("K_MIN", "K_MAX", "L_MIN", "L_MAX"),
                       help="support region in bins (default -2 8 -9 9)")
        if name == "check":
            p.add_argument("--basis", choices=BASES, default="spread")
        else:
            p.add_argument("--bounds", default="1:10,1:10,1:10", help="inclusive A,B,C ranges")
            p.add_argument("--out", help="CSV output path (default stdout)")
        p.set_defaults(func=func)

    for name, func, helptext in (("simulate", cmd_simulate, "run a scenario config or preset"),
                                 ("papr-ccdf", cmd_papr_ccdf, "PAPR CCDF of random 4-QAM frames")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", help=f"TOML path or preset ({', '.join(PRESETS)})")
        p.add_argument("--out", help="CSV output path (default stdout)")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--frames", type=int, help="override the config frame count")
        p.add_argument("--workers", type=int, default=1, help="frame-level worker processes")
        p.set_defaults(func=func)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except ZakOtfsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
