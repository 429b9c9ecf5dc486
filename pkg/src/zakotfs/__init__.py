"""
Zak-OTFS with pulsone and GDAFT spread carriers.

The package mounts symbols on the quasi-periodic delay-Doppler basis,
spreads them with a generalized discrete affine Fourier transform,
passes them through fractional delay-Doppler channels, estimates the
effective channel from the cross-ambiguity function and detects data by
MMSE. OFDM, DFT-s-OFDM and multicarrier OTFS baselines, PAPR/NMSE/BER
metrics and a configuration-driven CLI complete the toolkit.
"""

from .ambiguity import (ambiguity_surface, cross_ambiguity, pulsone_lattice, spread_lattice,
                        transform_ambiguity_law)
from .channel import (NARROWBAND_SUPPORT, EffectiveChannel, PathChannel, SupportRegion, apply_channel,
                      channel_matrix, effective_taps, sample_veh_a)
from .errors import *  # noqa: F401,F403
from .gdaft import GdaftParams, SpreadCarrier, gdaft_forward, gdaft_inverse, gdaft_matrix, spread_carrier
from .metrics import ber, ccdf, nmse, papr, papr_ccdf
from .numtheory import ModInt, gauss_sum, jacobi, mod_inverse
from .rxchain import (crystallization_check, estimate_channel, mmse_detect, qam_demap, qam_map,
                      search_gdaft_params)
from .zak import DDGrid, SymbolFrame, demount_symbols, mount_symbols, pulsone

__version__ = "0.1.0"
