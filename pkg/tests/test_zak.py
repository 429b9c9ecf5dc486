import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import NARROW, PARAMS, crandn
from zakotfs.errors import IndexOutOfRange, InvalidParams
from zakotfs.gdaft import gdaft_forward
from zakotfs.zak import (DDGrid, SymbolFrame, basis_matrix, demount_symbols, mount_symbols, pulsone,
                         pulsone_matrix)


def test_grid_derived_quantities():
    g = DDGrid(17, 19, 30e3)
    assert g.size == 323
    assert g.tau_p == pytest.approx(1 / 30e3)
    assert g.bandwidth == pytest.approx(0.51e6)
    assert g.duration == pytest.approx(19 / 30e3)
    assert g.tau_p * g.nu_p == pytest.approx(1.0)
    assert g.flat_index(2, 3) == 2 + 3 * 17
    w = DDGrid(83, 13, 240e3)
    assert w.bandwidth == pytest.approx(19.92e6)


@pytest.mark.parametrize("M,N", [(1, 1), (0, 4), (3, -1)])
def test_grid_rejects_degenerate(M, N):
    with pytest.raises(InvalidParams):
        DDGrid(M, N, 1e3)


def test_dc_pulsone(grid):
    x = pulsone(grid, 0, 0)
    nz = np.flatnonzero(np.abs(x) > 0)
    assert list(nz) == list(range(0, 323, 17))
    assert np.allclose(x[nz], 1 / np.sqrt(19), atol=1e-15)


def test_pulsone_2_3(grid):
    x = pulsone(grid, 2, 3)
    d = np.arange(19)
    assert list(np.flatnonzero(x)) == list(2 + 17 * d)
    assert np.allclose(x[2 + 17 * d], np.exp(2j * np.pi * 3 * d / 19) / np.sqrt(19), atol=1e-15)
    assert abs(np.vdot(x, x) - 1) < 1e-14


def test_pulsone_index_checks(grid):
    with pytest.raises(IndexOutOfRange):
        pulsone(grid, 17, 0)
    with pytest.raises(IndexError):
        pulsone(grid, 0, -1)


@pytest.mark.parametrize("basis", ["pulsone", "spread"])
def test_orthonormality(grid, basis):
    S = basis_matrix(grid, basis, PARAMS)
    G = S.conj().T @ S
    assert np.max(np.abs(G - np.eye(grid.size))) < 1e-12


def test_fast_mount_matches_dense_superposition(grid, rng):
    X = crandn(rng, grid.M, grid.N)
    dense = sum(X[k, l] * pulsone(grid, k, l) for k in range(grid.M) for l in range(grid.N))
    fast = mount_symbols(SymbolFrame(X), grid)
    assert np.max(np.abs(fast - dense)) < 1e-12
    assert np.max(np.abs(pulsone_matrix(grid) @ X.reshape(-1, order="F") - dense)) < 1e-12


def test_spread_mount_is_gdaft_of_pulsone_mount(grid, rng):
    X = crandn(rng, grid.M, grid.N)
    xs = mount_symbols(SymbolFrame(X, "spread"), grid, PARAMS)
    xp = mount_symbols(SymbolFrame(X, "pulsone"), grid)
    assert np.max(np.abs(xs - gdaft_forward(xp, PARAMS))) < 1e-10


@pytest.mark.parametrize("basis", ["pulsone", "spread"])
def test_mount_examples(grid, basis):
    X = np.zeros((grid.M, grid.N))
    assert not np.any(mount_symbols(SymbolFrame(X, basis), grid, PARAMS))
    assert not np.any(demount_symbols(np.zeros(grid.size), basis, grid, PARAMS))
    X[4, 7] = 1
    single = mount_symbols(SymbolFrame(X, basis), grid, PARAMS)
    ref = basis_matrix(grid, basis, PARAMS)[:, grid.flat_index(4, 7)]
    assert np.max(np.abs(single - ref)) < 1e-12
    assert np.max(np.abs(demount_symbols(single, basis, grid, PARAMS) - X)) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["pulsone", "spread"]), st.integers(0, 2**32 - 1))
def test_round_trip_and_energy(basis, seed):
    r = np.random.default_rng(seed)
    X = crandn(r, NARROW.M, NARROW.N)
    x = mount_symbols(SymbolFrame(X, basis), NARROW, PARAMS)
    assert abs(np.vdot(x, x).real - np.sum(np.abs(X) ** 2)) < 1e-10
    assert np.max(np.abs(demount_symbols(x, basis, NARROW, PARAMS) - X)) < 1e-10


def test_symbol_frame_validation(grid):
    with pytest.raises(IndexOutOfRange):
        SymbolFrame(np.zeros((17, 19)), pilot=(17, 0))
    with pytest.raises(InvalidParams):
        SymbolFrame(np.zeros((17, 19)), basis="chirp")
    f = SymbolFrame.pilot_frame(grid, 8, 9, "spread")
    assert f.X[8, 9] == 1 and np.count_nonzero(f.X) == 1
