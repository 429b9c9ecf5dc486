"""
A short Monte-Carlo BER run of both bases with perfect and estimated CSI.
The fig4-ber preset runs the full version through the CLI.
"""

from zakotfs import DDGrid, GdaftParams
from zakotfs.simulate import LinkSetup, run_link

setup = LinkSetup(DDGrid(17, 19, 30e3), GdaftParams(3, 5, 7), snrs=(0.0, 10.0, 20.0),
                  modes=("perfect", 20.0), seed=1)
res = run_link(setup, frames=20)
for basis in setup.bases:
    for mode in setup.modes:
        print(basis, mode, ["%.2e" % b for b in res.ber(basis, mode)])
print("NMSE (dB) with a 20 dB pilot:", res.nmse_db("spread", 20.0).round(2))
