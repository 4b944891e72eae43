"""Thermal correlations and coherence of a dipolar-coupled spin pair."""

from .coherence import (
    BasisAngles,
    average_coherence,
    coherence_arbitrary,
    coherence_axial_xy,
    coherence_axial_z,
    correlated_coherence,
)
from .correlations import concurrence, geometric_discord, phi_coefficients
from .model import (
    ModelParams,
    RangeError,
    ReducedParams,
    gibbs_state,
    ground_state_label,
    partition_function,
    populations,
)

__version__ = "0.1.0"

__all__ = [
    "BasisAngles",
    "ModelParams",
    "RangeError",
    "ReducedParams",
    "average_coherence",
    "coherence_arbitrary",
    "coherence_axial_xy",
    "coherence_axial_z",
    "concurrence",
    "correlated_coherence",
    "geometric_discord",
    "gibbs_state",
    "ground_state_label",
    "partition_function",
    "phi_coefficients",
    "populations",
]
