"""Curie-Weiss partition function at complex inverse temperature.

Exact and integral evaluation of Z, the saddle structure near beta = 1,
critical curves, and Lee-Yang zeros.
"""

from .errors import NumericalError
from .model import ComplexBeta, PartitionValue, free_energy_estimate, z_binomial, z_enumerate
from .numerics import Precision, required_precision, stable_sum
from .quadrature import z_integral_f, z_integral_h
from .saddle import find_u_beta, xi

__version__ = "0.1.0"

__all__ = [
    "ComplexBeta",
    "NumericalError",
    "PartitionValue",
    "Precision",
    "find_u_beta",
    "free_energy_estimate",
    "required_precision",
    "stable_sum",
    "xi",
    "z_binomial",
    "z_enumerate",
    "z_integral_f",
    "z_integral_h",
]
