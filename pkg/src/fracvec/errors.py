"""Exception types raised across the package."""

from __future__ import annotations


class FracVecError(Exception):
    """Base class for all package errors."""


class DomainError(FracVecError, ValueError):
    """An argument lies outside the supported domain of a function."""


class PoleError(DomainError):
    """Evaluation at a pole (e.g. Gamma at a non-positive integer)."""


class GridTooSmallError(FracVecError, ValueError):
    pass


class OrderOutOfRangeError(FracVecError, ValueError):
    pass


class UnsupportedPathError(FracVecError, ValueError):
    """Segment or surface is not one of the supported axis-aligned shapes."""


class RegionOrientationError(FracVecError, ValueError):
    pass


class RegistryError(FracVecError, KeyError):
    pass


class InstabilityError(FracVecError, RuntimeError):
    """Time integration blew up (growth detector tripped)."""


class InsufficientDataError(FracVecError, ValueError):
    pass


class UnsupportedExponentError(DomainError):
    """Power-rule Caputo requested for a non-integer exponent below ``n - 1``."""


class PreconditionError(FracVecError, ValueError):
    """An operation's stated precondition does not hold (e.g. alpha_1 != alpha_4)."""
