"""Rotationally symmetric manifolds close to Riemannian Schwarzschild space."""

from .comparison import certify, h_delta, lipschitz_bound, setup
from .distances import ifd_bound_lakzian, ifd_bound_sorwen, tube_comparison
from .errors import *  # noqa: F401,F403
from .geometry import RotSymManifold, Tube
from .profiles import (
    AdmissibleProfile,
    Constant,
    FractionOfMax,
    MollifiedJoin,
    deep_well_profile,
    load_profile,
    schwarzschild_profile,
    sharp_turn_profile,
    sharp_turn_sequence,
    validate_profile,
)
from .schwarzschild import AppendedSchwarzschild

__version__ = "0.1.0"
