"""
Estimate a Veh-A channel from one pilot frame with either basis and
score it against the exact delay-Doppler taps.
"""

import numpy as np

from zakotfs import NARROWBAND_SUPPORT, DDGrid, GdaftParams, apply_channel, effective_taps, estimate_channel, nmse
from zakotfs.channel import add_noise, sample_veh_a, support_energy_fraction
from zakotfs.zak import basis_matrix

grid = DDGrid(17, 19, 30e3)
params = GdaftParams(3, 5, 7)
rng = np.random.default_rng(1)
ch = sample_veh_a(rng)
truth = effective_taps(ch, grid, NARROWBAND_SUPPORT)
print(f"tap energy inside the support: {100 * support_energy_fraction(ch, grid, NARROWBAND_SUPPORT):.1f}%")

for basis in ("pulsone", "spread"):
    xp = np.sqrt(grid.size) * basis_matrix(grid, basis, params)[:, grid.flat_index(8, 9)]
    y = apply_channel(xp, ch, grid)
    for snr in (np.inf, 20.0, 5.0):
        est = estimate_channel(add_noise(y, snr, rng), xp, NARROWBAND_SUPPORT)
        print(f"{basis:8s} pilot SNR {snr:>4} dB: NMSE {nmse(est, truth):6.2f} dB")
