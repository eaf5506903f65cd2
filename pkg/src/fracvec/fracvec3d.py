"""Fractional gradient, divergence and curl on a parallelepiped.

The fractional nabla is the triple of axis-wise Caputo derivatives, each taken
from the box's lower bound on that axis to the running coordinate. All
operators are built by applying the 1-D scheme of :mod:`fracvec.frac1d` along
every grid line, so fields depend on the whole box and not only on a
neighbourhood of the evaluation point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from fracvec.errors import DomainError, GridTooSmallError, OrderOutOfRangeError
from fracvec.frac1d import (
    MIN_NODES,
    FracOrder,
    UniformGrid1D,
    as_order,
    caputo_along,
    caputo_semigroup_counterexample,
)
from fracvec.registry import (
    Function1D,
    ScalarFieldSpec,
    VectorFieldSpec,
    parse_function,
    parse_scalar_field,
    parse_vector_field,
)

AXES = ("x", "y", "z")

# {{{ domain and fields


@dataclass(frozen=True)
class BoxDomain:
    """The box ``[a,b] x [c,d] x [g,h]`` sampled with ``(mx, my, mz)`` nodes."""

    bounds: tuple[tuple[float, float], tuple[float, float], tuple[float, float]] = (
        (0.0, 1.0),
        (0.0, 1.0),
        (0.0, 1.0),
    )
    resolution: tuple[int, int, int] = (16, 16, 16)

    def __post_init__(self) -> None:
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        resolution = tuple(int(m) for m in self.resolution)
        if len(bounds) != 3 or len(resolution) != 3:
            raise ValueError("a box needs three intervals and three node counts")
        for (lo, hi), m in zip(bounds, resolution):
            if not lo < hi:
                raise DomainError(f"degenerate interval [{lo}, {hi}]")
            if m < MIN_NODES:
                raise GridTooSmallError(f"need at least {MIN_NODES} nodes per axis, got {m}")
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "resolution", resolution)

    @classmethod
    def cube(cls, m: int, lo: float = 0.0, hi: float = 1.0) -> BoxDomain:
        return cls(((lo, hi),) * 3, (m, m, m))

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.resolution

    @property
    def spacing(self) -> tuple[float, float, float]:
        return tuple((hi - lo) / (m - 1) for (lo, hi), m in zip(self.bounds, self.resolution))  # type: ignore[return-value]

    @property
    def axes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(np.linspace(lo, hi, m) for (lo, hi), m in zip(self.bounds, self.resolution))  # type: ignore[return-value]

    def mesh(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(np.meshgrid(*self.axes, indexing="ij"))  # type: ignore[return-value]

    def scalar(self, spec: str | ScalarFieldSpec | Callable) -> ScalarField3D:
        """Sample a registry key, a parsed spec, or a callable ``f(x, y, z)``."""
        if isinstance(spec, str):
            spec = parse_scalar_field(spec)
        if isinstance(spec, ScalarFieldSpec):
            values = spec.sample(self.axes)
        else:
            values = np.broadcast_to(spec(*self.mesh()), self.shape)
        return ScalarField3D(self, values)

    def vector(self, spec: str | VectorFieldSpec | tuple) -> VectorField3D:
        if isinstance(spec, str):
            spec = parse_vector_field(spec)
        comps = spec.components if isinstance(spec, VectorFieldSpec) else spec
        return VectorField3D(self, tuple(self.scalar(c) for c in comps))  # type: ignore[arg-type]


@dataclass(frozen=True)
class ScalarField3D:
    domain: BoxDomain
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        if values.shape != self.domain.shape:
            raise ValueError(f"values have shape {values.shape}, domain is {self.domain.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def with_values(self, values: np.ndarray) -> ScalarField3D:
        return ScalarField3D(self.domain, values)

    def __add__(self, other: ScalarField3D) -> ScalarField3D:
        return self.with_values(self.values + other.values)

    def __sub__(self, other: ScalarField3D) -> ScalarField3D:
        return self.with_values(self.values - other.values)

    def __mul__(self, other: ScalarField3D | float) -> ScalarField3D:
        if isinstance(other, ScalarField3D):
            return self.with_values(self.values * other.values)
        return self.with_values(self.values * other)

    __rmul__ = __mul__


@dataclass(frozen=True)
class VectorField3D:
    domain: BoxDomain
    components: tuple[ScalarField3D, ScalarField3D, ScalarField3D]

    def __post_init__(self) -> None:
        if len(self.components) != 3:
            raise ValueError("a vector field has three components")
        if any(c.domain != self.domain for c in self.components):
            raise ValueError("all components must live on the field's domain")

    @classmethod
    def from_arrays(cls, domain: BoxDomain, arrays) -> VectorField3D:
        return cls(domain, tuple(ScalarField3D(domain, a) for a in arrays))  # type: ignore[arg-type]

    @classmethod
    def zeros(cls, domain: BoxDomain) -> VectorField3D:
        return cls.from_arrays(domain, [np.zeros(domain.shape)] * 3)

    @property
    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(c.values for c in self.components)  # type: ignore[return-value]

    def map(self, fn: Callable[[np.ndarray], np.ndarray]) -> VectorField3D:
        return VectorField3D.from_arrays(self.domain, [fn(a) for a in self.arrays])

    def __add__(self, other: VectorField3D) -> VectorField3D:
        return VectorField3D.from_arrays(
            self.domain, [a + b for a, b in zip(self.arrays, other.arrays)]
        )

    def __sub__(self, other: VectorField3D) -> VectorField3D:
        return VectorField3D.from_arrays(
            self.domain, [a - b for a, b in zip(self.arrays, other.arrays)]
        )

    def __mul__(self, other: float) -> VectorField3D:
        return self.map(lambda a: a * other)

    __rmul__ = __mul__


# }}}


# {{{ operators


def _vector_order(ord: FracOrder | float) -> FracOrder:
    ord = as_order(ord)
    if not 0 < ord.alpha <= 1:
        raise OrderOutOfRangeError(f"vector operators need 0 < alpha <= 1: {ord.alpha}")
    return ord


def partial_alpha(values: np.ndarray, domain: BoxDomain, axis: int, ord: FracOrder | float) -> np.ndarray:
    """Caputo derivative of order alpha along one axis of a sampled field."""
    ord = as_order(ord)
    return caputo_along(values, domain.spacing[axis], ord.alpha, axis=axis)


def grad_alpha(f: ScalarField3D, ord: FracOrder | float) -> VectorField3D:
    ord = _vector_order(ord)
    return VectorField3D.from_arrays(
        f.domain, [partial_alpha(f.values, f.domain, ax, ord) for ax in range(3)]
    )


def div_alpha(F: VectorField3D, ord: FracOrder | float) -> ScalarField3D:
    ord = _vector_order(ord)
    total = sum(partial_alpha(F.arrays[ax], F.domain, ax, ord) for ax in range(3))
    return ScalarField3D(F.domain, total)


def curl_alpha(F: VectorField3D, ord: FracOrder | float) -> VectorField3D:
    ord = _vector_order(ord)
    Fx, Fy, Fz = F.arrays
    d = lambda v, ax: partial_alpha(v, F.domain, ax, ord)  # noqa: E731
    return VectorField3D.from_arrays(
        F.domain,
        [d(Fz, 1) - d(Fy, 2), d(Fx, 2) - d(Fz, 0), d(Fy, 0) - d(Fx, 1)],
    )


def nabla_squared(F: VectorField3D, ord: FracOrder | float) -> VectorField3D:
    """``(D_W)^2 F``: the sum over axes of the twice-applied axis derivative."""
    ord = _vector_order(ord)

    def lap(v: np.ndarray) -> np.ndarray:
        return sum(
            partial_alpha(partial_alpha(v, F.domain, ax, ord), F.domain, ax, ord)
            for ax in range(3)
        )

    return F.map(lap)


# }}}


# {{{ identity residuals


def interior_max3d(values: np.ndarray) -> float:
    """Max-norm with a one-node margin on every axis."""
    return float(np.max(np.abs(np.asarray(values)[1:-1, 1:-1, 1:-1])))


def _vmax(F: VectorField3D) -> float:
    return max(interior_max3d(a) for a in F.arrays)


def curl_grad_residual(f: ScalarField3D, ord: FracOrder | float) -> float:
    return _vmax(curl_alpha(grad_alpha(f, ord), ord))


def div_curl_residual(F: VectorField3D, ord: FracOrder | float) -> float:
    return interior_max3d(div_alpha(curl_alpha(F, ord), ord).values)


def double_curl_residual(F: VectorField3D, ord: FracOrder | float) -> float:
    """Max-norm of ``Curl Curl F - Grad Div F + (D_W)^2 F``."""
    cc = curl_alpha(curl_alpha(F, ord), ord)
    gd = grad_alpha(div_alpha(F, ord), ord)
    return _vmax(cc - gd + nabla_squared(F, ord))


def caputo_square_vs_double_order(
    f: str | Function1D = "x", ord: FracOrder | float = 0.7, m: int = 1025
) -> tuple[UniformGrid1D, UniformGrid1D]:
    """``(D^alpha D^alpha f, D^(2 alpha) f)`` on ``[0, 1]``."""
    ord = as_order(ord)
    fn = parse_function(f) if isinstance(f, str) else f
    grid = UniformGrid1D.from_function(fn, 0.0, 1.0, m)
    return caputo_semigroup_counterexample(ord, m=m, f=grid)


def leibniz_violation_gap(f: ScalarField3D, g: ScalarField3D, ord: FracOrder | float) -> float:
    """Max-norm over all nodes of ``Grad(fg) - (Grad f) g - f Grad g``."""
    if f.domain != g.domain:
        raise ValueError("f and g must share one domain")
    lhs = grad_alpha(f * g, ord)
    gf, gg = grad_alpha(f, ord), grad_alpha(g, ord)
    gap = [
        lhs.arrays[ax] - gf.arrays[ax] * g.values - f.values * gg.arrays[ax]
        for ax in range(3)
    ]
    return float(max(np.max(np.abs(v)) for v in gap))


# }}}


# {{{ classical references


def classical_grad(f: ScalarField3D) -> VectorField3D:
    """Second-order finite-difference gradient."""
    h = f.domain.spacing
    return VectorField3D.from_arrays(
        f.domain, [np.gradient(f.values, h[ax], axis=ax, edge_order=2) for ax in range(3)]
    )


def classical_div(F: VectorField3D) -> ScalarField3D:
    h = F.domain.spacing
    return ScalarField3D(
        F.domain,
        sum(np.gradient(F.arrays[ax], h[ax], axis=ax, edge_order=2) for ax in range(3)),
    )


def classical_curl(F: VectorField3D) -> VectorField3D:
    h = F.domain.spacing
    Fx, Fy, Fz = F.arrays
    d = lambda v, ax: np.gradient(v, h[ax], axis=ax, edge_order=2)  # noqa: E731
    return VectorField3D.from_arrays(
        F.domain, [d(Fz, 1) - d(Fy, 2), d(Fx, 2) - d(Fz, 0), d(Fy, 0) - d(Fx, 1)]
    )


def classical_residuals(F: VectorField3D, f: ScalarField3D) -> dict[str, float]:
    """Finite-difference residuals of the three classical identities."""
    cc = classical_curl(classical_curl(F))
    gd = classical_grad(classical_div(F))
    lap = F.map(
        lambda v: sum(
            np.gradient(np.gradient(v, h, axis=ax, edge_order=2), h, axis=ax, edge_order=2)
            for ax, h in enumerate(F.domain.spacing)
        )
    )
    return {
        "curl_grad": _vmax(classical_curl(classical_grad(f))),
        "div_curl": interior_max3d(classical_div(classical_curl(F)).values),
        "double_curl": _vmax(cc - gd + lap),
    }


# }}}

__all__ = [
    "AXES",
    "BoxDomain",
    "ScalarField3D",
    "VectorField3D",
    "caputo_square_vs_double_order",
    "classical_curl",
    "classical_div",
    "classical_grad",
    "classical_residuals",
    "curl_alpha",
    "curl_grad_residual",
    "div_alpha",
    "div_curl_residual",
    "double_curl_residual",
    "grad_alpha",
    "interior_max3d",
    "leibniz_violation_gap",
    "nabla_squared",
    "partial_alpha",
]
