"""Fractional circulation, flux and volume integrals and the integral theorems.

Line, surface and volume integrals are iterated RL integrals evaluated at the
far endpoint of each axis range. The theorem verifiers compare

* Green (rectangle): ``I_x[Fx(x,d) - Fx(x,c)] + I_y[Fy(a,y) - Fy(b,y)]``
  against ``I_x I_y (D_y Fx - D_x Fy)``;
* Stokes (planar face): the oriented circulation around the face against the
  flux of ``Curl^alpha F``;
* Gauss (box): ``sum_l I_(others)[F_l(upper) - F_l(lower)]`` against the
  volume integral of ``Div^alpha F``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from fracvec.errors import (
    DomainError,
    GridTooSmallError,
    OrderOutOfRangeError,
    RegionOrientationError,
    UnsupportedPathError,
)
from fracvec.frac1d import (
    MIN_NODES,
    FracOrder,
    as_order,
    caputo_along,
    rl_endpoint_weights,
)
from fracvec.fracvec3d import BoxDomain, ScalarField3D, VectorField3D, curl_alpha, div_alpha
from fracvec.registry import Function1D, parse_function, parse_scalar_field

# {{{ endpoint quadrature


def _endpoint_weights(m: int, h: float, alpha: float) -> np.ndarray:
    """Weights ``w`` with ``I^alpha_b f = w @ f`` on ``m`` nodes of spacing ``h``."""
    if m < 2:
        raise GridTooSmallError("an integration range needs at least two nodes")
    return h**alpha * rl_endpoint_weights(m, alpha)


def _integral_order(ord: FracOrder | float) -> FracOrder:
    ord = as_order(ord)
    if not 0 < ord.alpha <= 1:
        raise OrderOutOfRangeError(f"integral theorems need 0 < alpha <= 1: {ord.alpha}")
    return ord


# }}}


# {{{ reports


@dataclass(frozen=True)
class TheoremReport:
    lhs: float
    rhs: float
    residual: float
    grid: tuple[int, ...]
    alpha: FracOrder

    @classmethod
    def compare(cls, lhs: float, rhs: float, grid, alpha: FracOrder) -> TheoremReport:
        lhs, rhs = float(lhs), float(rhs)
        return cls(lhs, rhs, abs(lhs - rhs), tuple(int(m) for m in grid), alpha)

    COLUMNS = ("alpha", "grid", "lhs", "rhs", "residual")

    def to_row(self) -> dict[str, object]:
        return {
            "alpha": self.alpha.alpha,
            "grid": "x".join(str(m) for m in self.grid),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "residual": self.residual,
        }


# }}}


# {{{ paths and faces


@dataclass(frozen=True)
class Segment:
    """Axis-aligned segment from *start* to *end* (points in the box).

    The integral runs from the coordinate-wise lower end to the upper end;
    a segment traversed against the axis contributes with a minus sign.
    """

    start: tuple[float, float, float]
    end: tuple[float, float, float]

    @property
    def axis(self) -> int:
        diff = [i for i in range(3) if self.start[i] != self.end[i]]
        if len(diff) != 1:
            raise UnsupportedPathError(
                f"only axis-aligned, non-degenerate segments are supported: {self}"
            )
        return diff[0]

    @property
    def sign(self) -> int:
        ax = self.axis
        return 1 if self.end[ax] > self.start[ax] else -1

    def reversed(self) -> Segment:
        return Segment(self.end, self.start)


def _node_index(domain: BoxDomain, axis: int, coord: float) -> int:
    lo, hi = domain.bounds[axis]
    h = domain.spacing[axis]
    pos = (coord - lo) / h
    idx = int(round(pos))
    if abs(pos - idx) > 1e-9 * max(1.0, abs(pos)) or not 0 <= idx < domain.shape[axis]:
        raise UnsupportedPathError(
            f"coordinate {coord} on axis {axis} is not a grid node of [{lo}, {hi}]"
        )
    return idx


def circulation_alpha(F: VectorField3D, segment: Segment, ord: FracOrder | float) -> float:
    """Fractional line integral of the matching component along *segment*."""
    ord = as_order(ord)
    ax = segment.axis
    dom = F.domain

    idx = [_node_index(dom, i, segment.start[i]) for i in range(3)]
    i0 = idx[ax]
    i1 = _node_index(dom, ax, segment.end[ax])
    lo, hi = min(i0, i1), max(i0, i1)

    sl: list = list(idx)
    sl[ax] = slice(lo, hi + 1)
    line = F.arrays[ax][tuple(sl)]
    w = _endpoint_weights(line.size, dom.spacing[ax], ord.alpha)
    return segment.sign * float(w @ line)


@dataclass(frozen=True)
class Face:
    """A full face-parallel cross-section ``x_axis = const`` of the box.

    ``orientation`` is +1 for the normal along the positive axis.
    """

    axis: int
    index: int
    orientation: int = 1

    def __post_init__(self) -> None:
        if self.axis not in (0, 1, 2):
            raise UnsupportedPathError(f"axis must be 0, 1 or 2: {self.axis}")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")

    @classmethod
    def of_box(cls, domain: BoxDomain, axis: int, side: str) -> Face:
        """``side`` is ``"lower"`` or ``"upper"``; the normal points outward."""
        if side == "lower":
            return cls(axis, 0, -1)
        if side == "upper":
            return cls(axis, domain.shape[axis] - 1, 1)
        raise ValueError(f"side must be 'lower' or 'upper': {side!r}")

    @property
    def in_face_axes(self) -> tuple[int, int]:
        """The two remaining axes in cyclic order after the normal."""
        return ((self.axis + 1) % 3, (self.axis + 2) % 3)

    def flipped(self) -> Face:
        return Face(self.axis, self.index, -self.orientation)


def _double_endpoint(values2d: np.ndarray, h: tuple[float, float], alpha: float) -> float:
    wa = _endpoint_weights(values2d.shape[0], h[0], alpha)
    wb = _endpoint_weights(values2d.shape[1], h[1], alpha)
    return float(wa @ values2d @ wb)


def _face_slice(values: np.ndarray, face: Face) -> np.ndarray:
    """Restrict to the face plane with axes ordered ``(m, n)`` as in ``in_face_axes``."""
    plane = np.take(values, face.index, axis=face.axis)
    # np.take drops the normal axis; remaining axes are in increasing order
    m, n = face.in_face_axes
    return plane if m < n else plane.T


def flux_alpha(F: VectorField3D, face: Face, ord: FracOrder | float) -> float:
    """Iterated RL integral of the normal component over *face*."""
    ord = as_order(ord)
    if not 0 <= face.index < F.domain.shape[face.axis]:
        raise UnsupportedPathError(f"face index {face.index} outside the box")
    plane = _face_slice(F.arrays[face.axis], face)
    m, n = face.in_face_axes
    h = (F.domain.spacing[m], F.domain.spacing[n])
    return face.orientation * _double_endpoint(plane, h, ord.alpha)


def volume_alpha(f: ScalarField3D, ord: FracOrder | float) -> float:
    """Triple RL integral over the box evaluated at ``(b, d, h)``."""
    ord = as_order(ord)
    out = f.values
    for ax in (2, 1, 0):
        w = _endpoint_weights(f.domain.shape[ax], f.domain.spacing[ax], ord.alpha)
        out = np.tensordot(out, w, axes=([ax], [0]))
    return float(out)


# }}}


# {{{ Green


@dataclass(frozen=True)
class RectRegion2D:
    bounds: tuple[tuple[float, float], tuple[float, float]] = ((0.0, 1.0), (0.0, 1.0))
    resolution: tuple[int, int] = (32, 32)

    def __post_init__(self) -> None:
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        resolution = tuple(int(m) for m in self.resolution)
        for (lo, hi), m in zip(bounds, resolution):
            if not lo < hi:
                raise DomainError(f"degenerate interval [{lo}, {hi}]")
            if m < MIN_NODES:
                raise GridTooSmallError(f"need at least {MIN_NODES} nodes per axis, got {m}")
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "resolution", resolution)

    @classmethod
    def square(cls, m: int, lo: float = 0.0, hi: float = 1.0) -> RectRegion2D:
        return cls(((lo, hi), (lo, hi)), (m, m))

    @property
    def spacing(self) -> tuple[float, float]:
        return tuple((hi - lo) / (m - 1) for (lo, hi), m in zip(self.bounds, self.resolution))  # type: ignore[return-value]

    @property
    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return tuple(np.linspace(lo, hi, m) for (lo, hi), m in zip(self.bounds, self.resolution))  # type: ignore[return-value]

    def sample(self, spec: str | Callable) -> np.ndarray:
        """Sample ``"fx|fy"`` registry products or a callable ``f(x, y)``."""
        X, Y = np.meshgrid(*self.axes, indexing="ij")
        if isinstance(spec, str):
            parsed = parse_scalar_field(spec)
            return parsed(X, Y, np.zeros_like(X))
        return np.broadcast_to(np.asarray(spec(X, Y), dtype=np.float64), X.shape)


@dataclass(frozen=True)
class VectorField2D:
    region: RectRegion2D
    fx: np.ndarray
    fy: np.ndarray

    @classmethod
    def from_key(cls, region: RectRegion2D, key: str) -> VectorField2D:
        """``"Fx;Fy"`` where each component is a ``"fx|fy"`` registry product."""
        parts = key.split(";")
        if len(parts) != 2:
            raise ValueError(f"a planar field key has two components: {key!r}")
        return cls(region, region.sample(parts[0]), region.sample(parts[1]))


def _green_sides(
    P: np.ndarray, Q: np.ndarray, h: tuple[float, float], alpha: float
) -> tuple[float, float]:
    """Both sides of the rectangle formula for components ``(P, Q)`` on a plane."""
    hx, hy = h
    wx = _endpoint_weights(P.shape[0], hx, alpha)
    wy = _endpoint_weights(P.shape[1], hy, alpha)

    lhs = wx @ (P[:, -1] - P[:, 0]) + wy @ (Q[0, :] - Q[-1, :])
    curl = caputo_along(P, hy, alpha, axis=1) - caputo_along(Q, hx, alpha, axis=0)
    rhs = wx @ curl @ wy
    return float(lhs), float(rhs)


def green_residual(F: VectorField2D, ord: FracOrder | float) -> TheoremReport:
    """Fractional Green formula on a rectangle."""
    ord = _integral_order(ord)
    lhs, rhs = _green_sides(F.fx, F.fy, F.region.spacing, ord.alpha)
    return TheoremReport.compare(lhs, rhs, F.region.resolution, ord)


# }}}


# {{{ Stokes and Gauss


def face_boundary(domain: BoxDomain, face: Face) -> tuple[Segment, Segment, Segment, Segment]:
    """The four edges of *face*, traversed positively about the face normal."""
    m, n = face.in_face_axes
    coord = domain.axes[face.axis][face.index]
    (m0, m1), (n0, n1) = domain.bounds[m], domain.bounds[n]

    def point(mv: float, nv: float) -> tuple[float, float, float]:
        p = [0.0, 0.0, 0.0]
        p[face.axis], p[m], p[n] = coord, mv, nv
        return tuple(p)  # type: ignore[return-value]

    corners = [point(m0, n0), point(m1, n0), point(m1, n1), point(m0, n1)]
    if face.orientation < 0:
        corners = corners[::-1]
    return tuple(Segment(corners[i], corners[(i + 1) % 4]) for i in range(4))  # type: ignore[return-value]


def stokes_residual(F: VectorField3D, face: Face, ord: FracOrder | float) -> TheoremReport:
    """Circulation around a coordinate-plane face against the flux of the curl."""
    ord = _integral_order(ord)
    if not isinstance(face, Face):
        raise UnsupportedPathError("only coordinate-plane faces are supported")

    lhs = sum(circulation_alpha(F, seg, ord) for seg in face_boundary(F.domain, face))
    rhs = flux_alpha(curl_alpha(F, ord), face, ord)
    m, n = face.in_face_axes
    return TheoremReport.compare(lhs, rhs, (F.domain.shape[m], F.domain.shape[n]), ord)


def gauss_residual(F: VectorField3D, ord: FracOrder | float) -> TheoremReport:
    """Sum of outward face fluxes against the volume integral of the divergence."""
    ord = _integral_order(ord)
    dom = F.domain
    lhs = sum(
        flux_alpha(F, Face.of_box(dom, ax, side), ord)
        for ax in range(3)
        for side in ("upper", "lower")
    )
    rhs = volume_alpha(div_alpha(F, ord), ord)
    return TheoremReport.compare(lhs, rhs, dom.shape, ord)


# }}}


# {{{ non-rectangular regions


@dataclass(frozen=True)
class ElementaryRegion2D:
    """``{(x, y): a <= x <= b, phi1(x) <= y <= phi2(x)}``."""

    a: float
    b: float
    phi1: Function1D | str
    phi2: Function1D | str
    resolution: int = 256

    def __post_init__(self) -> None:
        if not self.a < self.b:
            raise DomainError(f"degenerate interval [{self.a}, {self.b}]")
        if self.resolution < MIN_NODES:
            raise GridTooSmallError(f"need at least {MIN_NODES} nodes, got {self.resolution}")
        for name in ("phi1", "phi2"):
            fn = getattr(self, name)
            if isinstance(fn, str):
                object.__setattr__(self, name, parse_function(fn))

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.resolution)

    def bounds_at(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        lo = np.broadcast_to(self.phi1(x), x.shape)  # type: ignore[operator]
        hi = np.broadcast_to(self.phi2(x), x.shape)  # type: ignore[operator]
        return lo, hi


def elementary_region_integral(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray] | str,
    region: ElementaryRegion2D,
    ord: FracOrder | float,
    inner_resolution: int | None = None,
) -> float:
    """Outer RL integral over ``x`` of the inner RL integral from ``phi1(x)`` to ``phi2(x)``.

    The inner integrand is re-sampled on a fresh uniform grid per outer node.
    """
    ord = as_order(ord)
    fn = _planar_function(f)
    x = region.x
    lo, hi = region.bounds_at(x)
    if np.any(lo > hi):
        raise RegionOrientationError("phi1 exceeds phi2 somewhere on [a, b]")

    mi = inner_resolution or region.resolution
    t = np.linspace(0.0, 1.0, mi)
    width = hi - lo
    Y = lo[:, None] + width[:, None] * t[None, :]
    X = np.broadcast_to(x[:, None], Y.shape)
    vals = np.broadcast_to(np.asarray(fn(X, Y), dtype=np.float64), Y.shape)

    unit = rl_endpoint_weights(mi, ord.alpha)
    inner = (width / (mi - 1)) ** ord.alpha * (vals @ unit)

    wx = _endpoint_weights(x.size, (region.b - region.a) / (x.size - 1), ord.alpha)
    return float(wx @ inner)


def indicator_embedding(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray] | str,
    member: Callable[[np.ndarray, np.ndarray], np.ndarray],
    W: RectRegion2D,
    ord: FracOrder | float,
) -> float:
    """Double RL integral over the rectangle *W* of ``f`` times the indicator of ``R``."""
    ord = as_order(ord)
    fn = _planar_function(f)
    X, Y = np.meshgrid(*W.axes, indexing="ij")
    vals = np.where(member(X, Y), fn(X, Y), 0.0)
    return _double_endpoint(vals, W.spacing, ord.alpha)


def _planar_function(f) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    if isinstance(f, str):
        spec = parse_scalar_field(f)
        return lambda x, y: spec(x, y, np.zeros_like(x))
    return f


# }}}
