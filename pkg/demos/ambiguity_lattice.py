"""
Where the self-ambiguity of a carrier lives, and when a channel support
can be read off it without aliasing.
"""

import numpy as np

from zakotfs import (NARROWBAND_SUPPORT, DDGrid, GdaftParams, ambiguity_surface, crystallization_check,
                     search_gdaft_params, spread_carrier)
from zakotfs.ambiguity import spread_lattice

grid = DDGrid(17, 19, 30e3)
good, bad = GdaftParams(3, 5, 7), GdaftParams(2, 5, 7)

A = np.abs(ambiguity_surface(spread_carrier(grid, good, 8, 9)))
peaks = {tuple(p) for p in np.argwhere(A > 1e-10)}
print(len(peaks), "nonzero ambiguity bins; equal to the predicted lattice:",
      peaks == {tuple(v) for v in spread_lattice(grid, good)})

for p in (good, bad):
    res = crystallization_check(NARROWBAND_SUPPORT, grid, "spread", p)
    print(p.as_tuple(), "PASS" if res else f"FAIL, witness {res.witness}")

found = search_gdaft_params(grid, NARROWBAND_SUPPORT)
print(len(found), "feasible triples in [1,10]^3, first few:", [p.as_tuple() for p in found[:5]])
