"""
Spread carriers on the narrowband grid.

Builds the GDAFT-spread version of a pulsone, checks that it is constant
modulus, compares per-carrier PAPR and saves the waveform as an I/Q file.
"""

import numpy as np

from zakotfs import DDGrid, GdaftParams, gdaft_forward, papr, pulsone, spread_carrier
from zakotfs.iqfile import read_iq, write_iq

grid = DDGrid(M=17, N=19, nu_p=30e3)
params = GdaftParams(3, 5, 7)

x_p = pulsone(grid, 2, 3)
x_c = spread_carrier(grid, params, 2, 3)

print(f"grid: {grid.size} samples at {grid.bandwidth / 1e6:.2f} MHz")
print("closed form vs transform:", np.max(np.abs(x_c - gdaft_forward(x_p, params))))
print("amplitude spread:", np.ptp(np.abs(x_c)), "around", 1 / np.sqrt(grid.size))
print(f"PAPR pulsone {papr(x_p):.2f} dB, spread {papr(x_c):.2f} dB")

write_iq("spread_2_3.iq", x_c, {"M": grid.M, "N": grid.N, "basis": "spread", "k0": 2, "l0": 3})
header, back = read_iq("spread_2_3.iq")
print("I/Q round trip:", header["basis"], back.size, np.array_equal(back, x_c))
