import numpy as np
import pytest

from conftest import NARROW, PARAMS, crandn
from zakotfs.ambiguity import (ambiguity_rows, ambiguity_surface, cross_ambiguity, pulsone_lattice,
                               pulsone_self_ambiguity, spread_lattice, transform_ambiguity_law,
                               write_surface_csv)
from zakotfs.errors import GridMismatch
from zakotfs.gdaft import GdaftParams, gdaft_forward, spread_carrier
from zakotfs.zak import DDGrid, pulsone


def _direct(y, x, k, l):
    L = y.size
    n = np.arange(L)
    return np.sum(y * np.conj(x[(n - k) % L]) * np.exp(-2j * np.pi * l * (n - k) / L)) / L


def test_origin_of_unit_energy_signal(rng):
    x = crandn(rng, 323)
    x /= np.linalg.norm(x)
    assert abs(cross_ambiguity(x, x, 0, 0) - 1 / 323) < 1e-15


def test_direct_sum_oracle(rng):
    x, y = crandn(rng, 323), crandn(rng, 323)
    for k, l in rng.integers(-400, 400, size=(20, 2)):
        assert abs(cross_ambiguity(y, x, k, l) - _direct(y, x, k, l)) < 1e-12
    rows = ambiguity_rows(y, x, [0, 5, -3])
    for i, k in enumerate([0, 5, -3]):
        for l in (0, 7, 300):
            assert abs(rows[i, l] - _direct(y, x, k, l)) < 1e-12


def test_surface_is_periodic_and_bounded(rng):
    x = crandn(rng, 35)
    S = ambiguity_surface(x)
    assert np.all(np.abs(S) <= abs(S[0, 0]) + 1e-14)
    assert abs(S[0, 0] - np.vdot(x, x) / 35) < 1e-14
    assert cross_ambiguity(x, x, 3 + 35, 4 - 70) == pytest.approx(S[3, 4], abs=1e-14)


def test_length_mismatch():
    with pytest.raises(GridMismatch):
        cross_ambiguity(np.ones(5), np.ones(6), 0, 0)


def test_pulsone_self_ambiguity_closed_form(grid):
    for kp, lp in [(0, 0), (8, 9), (16, 2)]:
        x = pulsone(grid, kp, lp)
        S = ambiguity_surface(x)
        assert np.max(np.abs(S - pulsone_self_ambiguity(grid, kp, lp))) < 1e-12


def test_law_origin_and_bijection():
    p = GdaftParams(3, 5, 7)
    assert transform_ambiguity_law(p, 323, 0, 0) == (1 + 0j, 0, 0)
    q = GdaftParams(2, 7, 4)
    image = {transform_ambiguity_law(q, 15, k, l)[1:] for k in range(15) for l in range(15)}
    assert len(image) == 225


def test_law_against_brute_force(rng):
    x, y = crandn(rng, 323), crandn(rng, 323)
    fx, fy = gdaft_forward(x, PARAMS), gdaft_forward(y, PARAMS)
    for k, l in rng.integers(0, 323, size=(30, 2)):
        ph, kb, lb = transform_ambiguity_law(PARAMS, 323, int(k), int(l))
        assert abs(cross_ambiguity(fy, fx, k, l) - ph * cross_ambiguity(y, x, kb, lb)) < 1e-10


def test_spread_self_ambiguity_support_is_lattice(grid):
    x = spread_carrier(grid, PARAMS, 8, 9)
    S = np.abs(ambiguity_surface(x))
    support = {tuple(v) for v in np.argwhere(S > 1e-10)}
    lattice = {tuple(v) for v in spread_lattice(grid, PARAMS)}
    assert support == lattice
    assert len(lattice) == grid.size


def test_lattice_is_theorem_map_of_pulsone_lattice(grid):
    # the law maps (k, l) in the spread ambiguity to (k_bar, l_bar) in the pulsone one
    spread = spread_lattice(grid, PARAMS)
    pul = {tuple(v) for v in pulsone_lattice(grid)}
    for k, l in spread:
        assert transform_ambiguity_law(PARAMS, grid.size, int(k), int(l))[1:] in pul


def test_surface_csv(tmp_path, grid):
    S = ambiguity_surface(pulsone(grid, 0, 0))
    n = write_surface_csv(S, tmp_path / "a.csv", threshold=1e-9)
    assert n == grid.size
    lines = (tmp_path / "a.csv").read_text().splitlines()
    assert lines[0] == "k,l,magnitude" and len(lines) == n + 1
