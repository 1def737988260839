"""Band structures of time-modulated one-dimensional resonator chains.

Three routes compute quasifrequencies: a truncated exact formulation solved
with Muller's method, the capacitance approximation integrated over one
modulation period, and first-order perturbation theory in the modulation
amplitude.
"""

from .capacitance import capacitance_matrix, generalized_capacitance, static_bands
from .config import RunConfig, load_preset, parse_config
from .exact import TruncationParams, exact_quasifrequencies
from .floquet import floquet_spectrum, monodromy
from .model import MaterialConstants, Modulation, ResonatorChain
from .spectrum import QuasifrequencySpectrum, fold

__version__ = "0.1.0"

__all__ = [
    "ResonatorChain", "MaterialConstants", "Modulation",
    "capacitance_matrix", "generalized_capacitance", "static_bands",
    "TruncationParams", "exact_quasifrequencies",
    "floquet_spectrum", "monodromy",
    "QuasifrequencySpectrum", "fold",
    "RunConfig", "load_preset", "parse_config",
]
