"""Numerical fractional vector calculus with Caputo and Riemann-Liouville operators."""

from __future__ import annotations

from fracvec.errors import (
    DomainError,
    FracVecError,
    GridTooSmallError,
    InstabilityError,
    InsufficientDataError,
    OrderOutOfRangeError,
    PoleError,
    PreconditionError,
    RegionOrientationError,
    RegistryError,
    UnsupportedExponentError,
    UnsupportedPathError,
)
from fracvec.frac1d import (
    FracOrder,
    PowerFunction,
    UniformGrid1D,
    caputo_derivative,
    rl_derivative,
    rl_integral,
)
from fracvec.fracvec3d import (
    BoxDomain,
    ScalarField3D,
    VectorField3D,
    curl_alpha,
    div_alpha,
    grad_alpha,
)
from fracvec.special_functions import MLParams, WrightParams, gamma, mittag_leffler, wright

__version__ = "0.1.0"

__all__ = [
    "BoxDomain",
    "DomainError",
    "FracOrder",
    "FracVecError",
    "GridTooSmallError",
    "InstabilityError",
    "InsufficientDataError",
    "MLParams",
    "OrderOutOfRangeError",
    "PoleError",
    "PowerFunction",
    "PreconditionError",
    "RegionOrientationError",
    "RegistryError",
    "ScalarField3D",
    "UniformGrid1D",
    "UnsupportedExponentError",
    "UnsupportedPathError",
    "VectorField3D",
    "WrightParams",
    "caputo_derivative",
    "curl_alpha",
    "div_alpha",
    "gamma",
    "grad_alpha",
    "mittag_leffler",
    "rl_derivative",
    "rl_integral",
    "wright",
]
