"""Adaptive cubature on embedded rank-1 lattices with data-driven error bounds."""

from .cone import ConeSpec, default_cone, error_bound
from .engine import CubatureRequest, CubatureResult, integrate, integrate_traced
from .lattice import GeneratingVector, Shift, nodes, nu_tilde, read_vector
from .transform import SpectralArray, transform

__version__ = "0.1.0"

__all__ = [
    "ConeSpec",
    "CubatureRequest",
    "CubatureResult",
    "GeneratingVector",
    "Shift",
    "SpectralArray",
    "default_cone",
    "error_bound",
    "integrate",
    "integrate_traced",
    "nodes",
    "nu_tilde",
    "read_vector",
    "transform",
]
