import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import NARROW, PARAMS, crandn
from zakotfs.channel import (NARROWBAND_SUPPORT, VEH_A_DELAYS_US, EffectiveChannel, PathChannel,
                             SupportRegion, add_noise, apply_channel, channel_matrix, channel_operator,
                             dirichlet, effective_taps, fractional_shift, noise_variance, sample_veh_a,
                             spreading_function, support_energy_fraction, validate_channel, veh_a_powers)
from zakotfs.errors import InvalidConfig, SupportTooLarge
from zakotfs.gdaft import gdaft_matrix
from zakotfs.zak import DDGrid, basis_matrix


def _single_tap_oracle(x, h, k, l):
    # y[n] = h x[n-k] exp(j2pi l (n-k) / L), all indices cyclic
    L = x.size
    n = np.arange(L)
    return h * x[(n - k) % L] * np.exp(2j * np.pi * l * (n - k) / L)


def _heisenberg(k, l, L):
    n = np.arange(L)
    D = np.zeros((L, L), dtype=complex)
    D[n, (n - k) % L] = np.exp(2j * np.pi * l * ((n - k) % L) / L)
    return D


def test_veh_a_profile():
    p = veh_a_powers()
    assert p.sum() == pytest.approx(1.0)
    assert 10 * np.log10(p[5] / p[0]) == pytest.approx(-20.0)
    ch = sample_veh_a(np.random.default_rng(1))
    assert ch.num_paths == 6
    assert np.allclose(ch.delays, np.array(VEH_A_DELAYS_US) * 1e-6)
    assert np.all(np.abs(ch.dopplers) <= 815.0)


def test_veh_a_determinism_and_mean_power():
    a = sample_veh_a(np.random.default_rng(7))
    b = sample_veh_a(np.random.default_rng(7))
    assert np.array_equal(a.gains, b.gains) and np.array_equal(a.dopplers, b.dopplers)
    r = np.random.default_rng(3)
    draws = np.array([np.abs(sample_veh_a(r).gains) ** 2 for _ in range(4000)])
    assert draws.sum(axis=1).mean() == pytest.approx(1.0, rel=0.05)
    assert draws.mean(axis=0) == pytest.approx(veh_a_powers(), rel=0.1)
    fixed = sample_veh_a(np.random.default_rng(3), fading="fixed")
    assert np.sum(np.abs(fixed.gains) ** 2) == pytest.approx(1.0)


def test_identity_channel(rng):
    x = crandn(rng, 323)
    assert np.max(np.abs(apply_channel(x, PathChannel.single(), NARROW) - x)) < 1e-13


@pytest.mark.parametrize("k,l", [(3, 2), (0, 5), (11, -4), (-2, 0)])
def test_integer_single_tap_matches_direct_evaluation(rng, k, l):
    g = NARROW
    x = crandn(rng, g.size)
    ch = PathChannel.single(0.8 - 0.3j, (k % g.size) / g.bandwidth, l / g.duration)
    y = apply_channel(x, ch, g)
    assert np.max(np.abs(y - _single_tap_oracle(x, 0.8 - 0.3j, k, l))) < 1e-10


def test_fractional_delay_of_tone_matches_phase_ramp():
    L = 323
    n = np.arange(L)
    for f in (3, -40, 161):
        tone = np.exp(2j * np.pi * f * n / L)
        # band-limited delay by half a sample is a pure phase ramp in the frequency domain
        ref = tone * np.exp(-2j * np.pi * f * 0.5 / L)
        assert np.max(np.abs(fractional_shift(tone, 0.5) - ref)) < 1e-8
    ch = PathChannel.single(1.0, 0.5 / NARROW.bandwidth, 0.0)
    x = np.exp(2j * np.pi * 7 * n / L)
    assert np.max(np.abs(apply_channel(x, ch, NARROW) - x * np.exp(-1j * np.pi * 7 / L))) < 1e-8


def test_fractional_delay_oversampled_oracle(rng):
    # delaying by 1/4 sample equals reading a 4x band-limited interpolation at offset -1
    L = 64
    x = crandn(rng, L)
    X = np.fft.fft(x)
    Y = np.zeros(4 * L, dtype=complex)
    Y[:L // 2] = X[:L // 2]
    Y[-L // 2 + 1:] = X[L // 2 + 1:]
    Y[L // 2] = Y[-L // 2] = X[L // 2] / 2
    fine = np.fft.ifft(Y) * 4
    ref = np.roll(fine, 1)[::4]
    assert np.max(np.abs(fractional_shift(x, 0.25) - ref)) < 1e-8


def test_dirichlet_is_shift_impulse_response():
    for L in (35, 36):
        e0 = np.zeros(L)
        e0[0] = 1
        assert np.max(np.abs(fractional_shift(e0, 2.3) - dirichlet(np.arange(L) - 2.3, L))) < 1e-12
        assert np.allclose(dirichlet(np.arange(L), L), e0, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_linearity(seed):
    r = np.random.default_rng(seed)
    ch = sample_veh_a(r)
    x1, x2 = crandn(r, 323), crandn(r, 323)
    a, b = complex(*r.standard_normal(2)), complex(*r.standard_normal(2))
    lhs = apply_channel(a * x1 + b * x2, ch, NARROW)
    rhs = a * apply_channel(x1, ch, NARROW) + b * apply_channel(x2, ch, NARROW)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_spreading_function_expands_operator_small_grid(rng):
    g = DDGrid(5, 7, 1e3)
    ch = PathChannel([0.9, 0.3j], [0.37 / g.bandwidth, 2.6 / g.bandwidth], [140.0, -95.0])
    Hop = channel_operator(ch, g)
    c = spreading_function(ch, g)
    L = g.size
    recon = sum(c[k, l] * _heisenberg(k, l, L) for k in range(L) for l in range(L))
    assert np.max(np.abs(recon - Hop)) < 1e-12


def test_effective_taps_examples():
    g = NARROW
    h = effective_taps(PathChannel.single(), g, NARROWBAND_SUPPORT)
    assert abs(h[0, 0] - 1) < 1e-12
    assert np.sum(np.abs(h.taps) ** 2) - 1 < 1e-12
    ch = PathChannel.single(1.0, 4 / g.bandwidth, 3 / g.duration)
    h = effective_taps(ch, g, NARROWBAND_SUPPORT)
    assert abs(h[4, 3] - 1) < 1e-10
    others = np.abs(h.taps).copy()
    others[NARROWBAND_SUPPORT.delays.tolist().index(4), NARROWBAND_SUPPORT.dopplers.tolist().index(3)] = 0
    assert others.max() < 1e-10


def test_support_energy_matches_operator_truncation():
    # Heisenberg operators are Frobenius-orthogonal, so the truncated operator's
    # relative error equals the out-of-support share of the spreading function.
    g = NARROW
    ch = sample_veh_a(np.random.default_rng(11))
    frac = support_energy_fraction(ch, g, NARROWBAND_SUPPORT)
    Hop = channel_operator(ch, g)
    Ht = channel_matrix(effective_taps(ch, g, NARROWBAND_SUPPORT), np.eye(g.size))
    rel = np.linalg.norm(Hop - Ht) ** 2 / np.linalg.norm(Hop) ** 2
    assert rel == pytest.approx(1 - frac, rel=1e-9)
    assert 0.85 < frac < 1.0


def test_support_region_contract():
    s = SupportRegion(-2, 8, -9, 9)
    assert s.shape == (11, 19) and len(s) == 209
    assert (0, 0) in s and (9, 0) not in s
    assert len(list(s.points())) == 209
    with pytest.raises(SupportTooLarge):
        SupportRegion(0, 17, 0, 0).validate(NARROW)
    with pytest.raises(SupportTooLarge):
        SupportRegion(0, 1, -200, 200).validate(NARROW)
    with pytest.raises(ValueError):
        SupportRegion(3, 2, 0, 0)


def test_channel_matrix_examples(rng):
    g = NARROW
    S = basis_matrix(g, "pulsone")
    unit = EffectiveChannel.from_dict({(0, 0): 1.0}, NARROWBAND_SUPPORT)
    assert np.max(np.abs(channel_matrix(unit, S) - S)) < 1e-14
    taps = {(int(k), int(l)): complex(*rng.standard_normal(2))
            for k, l in zip(rng.integers(-2, 9, 6), rng.integers(-9, 10, 6))}
    h = EffectiveChannel.from_dict(taps, NARROWBAND_SUPPORT)
    x = crandn(rng, g.size)
    X = x.reshape(g.M, g.N, order="F")
    direct = sum(v * _single_tap_oracle(S @ x, 1.0, k, l) for (k, l), v in taps.items())
    assert np.max(np.abs(channel_matrix(h, S) @ X.reshape(-1, order="F") - direct)) < 1e-10
    # change of basis: the spread matrix is the DD operator after U
    U = gdaft_matrix(g.size, PARAMS)
    Hs = channel_matrix(h, basis_matrix(g, "spread", PARAMS))
    assert np.max(np.abs(Hs - channel_matrix(h, np.eye(g.size)) @ U @ S)) < 1e-10


def test_validate_channel():
    validate_channel(NARROW, 2.51e-6, 815.0)
    with pytest.raises(InvalidConfig):
        validate_channel(NARROW, 40e-6, 815.0)
    with pytest.raises(InvalidConfig):
        validate_channel(NARROW, 1e-6, 20e3)


def test_noise():
    y = np.ones(10**5, dtype=complex)
    assert np.array_equal(add_noise(y, np.inf), y)
    w = add_noise(y, 10.0, np.random.default_rng(5)) - y
    assert np.mean(np.abs(w) ** 2) == pytest.approx(0.1, rel=0.03)
    assert abs(np.mean(w.real ** 2) - np.mean(w.imag ** 2)) < 0.003
    a = add_noise(y[:100], 3.0, np.random.default_rng(9))
    b = add_noise(y[:100], 3.0, np.random.default_rng(9))
    assert np.array_equal(a, b)
    assert noise_variance(20.0) == pytest.approx(0.01)


def test_channel_csv_round_trip(tmp_path):
    ch = sample_veh_a(np.random.default_rng(2))
    ch.to_csv(tmp_path / "ch.csv")
    back = PathChannel.from_csv(tmp_path / "ch.csv")
    assert np.array_equal(back.gains, ch.gains)
    assert np.array_equal(back.delays, ch.delays) and np.array_equal(back.dopplers, ch.dopplers)
    assert (tmp_path / "ch.csv").read_text().splitlines()[0] == "gain_re,gain_im,delay_s,doppler_hz"
