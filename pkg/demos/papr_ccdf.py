"""
PAPR distribution of random full 4-QAM frames in both bases, next to the
single-carrier values.
"""

import numpy as np

from zakotfs import DDGrid, GdaftParams
from zakotfs.simulate import basis_element_papr, papr_ccdf_curves

grid, params = DDGrid(17, 19, 30e3), GdaftParams(3, 5, 7)
print("single carriers:", {b: round(float(basis_element_papr(grid, b, params).max()), 2)
                           for b in ("pulsone", "spread")})
curves = papr_ccdf_curves(grid, params, frames=2000, seed=0)
for b, c in curves.items():
    p99 = c.thresholds[np.argmax(c.probabilities < 0.01)]
    print(f"{b}: median {c.median:.2f} dB, P(PAPR > x) < 1% from x = {p99:.1f} dB")
