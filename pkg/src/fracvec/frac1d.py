"""One-dimensional Riemann-Liouville and Caputo operators on uniform grids.

All operators are left-sided with lower limit ``a`` (the grid's left end).

* RL integral: product trapezoid, i.e. the piecewise linear interpolant of
  ``f`` integrated exactly against ``(x_n - s)^{alpha - 1} / Gamma(alpha)``.
* Caputo, ``0 < alpha < 1``: L1 scheme with a two-weight starting correction
  that makes it exact on ``(x - a)^alpha`` and on linear functions. The
  correction is dropped above :data:`CORRECTION_MAX_ALPHA`, where it only
  amplifies noise.
* Caputo, ``1 < alpha < 2``: product trapezoid of order ``2 - alpha`` applied
  to second differences.

Each scheme is a lower-triangular Toeplitz sum, applied through
:func:`fracvec.kernels.toeplitz_apply`. The unit-step weights are cached per
``(m, alpha)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from fracvec import kernels
from fracvec.errors import (
    DomainError,
    GridTooSmallError,
    OrderOutOfRangeError,
    UnsupportedExponentError,
)
from fracvec.special_functions import gamma

MIN_NODES = 8
MAX_ORDER = 2.0
#: above this order the starting correction is ill-conditioned, since
#: (x-a)^alpha and (x-a) become indistinguishable on three nodes
CORRECTION_MAX_ALPHA = 0.95


# {{{ types


@dataclass(frozen=True)
class FracOrder:
    """Fractional order :math:`\\alpha > 0` with ceiling ``n``."""

    alpha: float

    def __post_init__(self) -> None:
        alpha = float(self.alpha)
        if not (alpha > 0 and math.isfinite(alpha)):
            raise OrderOutOfRangeError(f"order must be positive and finite: {self.alpha}")
        object.__setattr__(self, "alpha", alpha)

    @property
    def n(self) -> int:
        return math.ceil(self.alpha)

    @property
    def is_integer(self) -> bool:
        return self.alpha == self.n


def as_order(alpha: FracOrder | float) -> FracOrder:
    return alpha if isinstance(alpha, FracOrder) else FracOrder(alpha)


@dataclass(frozen=True)
class UniformGrid1D:
    """Samples of a function at ``a + i (b - a) / (m - 1)``, ``i = 0, ..., m-1``.

    When *singular_start* is set, ``values[0]`` is an infinite sentinel for an
    operator that blows up at ``x = a``.
    """

    a: float
    b: float
    values: np.ndarray
    singular_start: bool = False

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise ValueError(f"values must be 1-D, got shape {values.shape}")
        if not self.a < self.b:
            raise DomainError(f"empty interval [{self.a}, {self.b}]")
        if values.size < MIN_NODES:
            raise GridTooSmallError(f"need at least {MIN_NODES} nodes, got {values.size}")
        tail = values[1:] if self.singular_start else values
        if not np.all(np.isfinite(tail)):
            raise ValueError("grid values must be finite")

        values.setflags(write=False)
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(
        cls, fn: Callable[[np.ndarray], np.ndarray], a: float, b: float, m: int
    ) -> UniformGrid1D:
        if m < MIN_NODES:
            raise GridTooSmallError(f"need at least {MIN_NODES} nodes, got {m}")
        x = np.linspace(a, b, m)
        return cls(a, b, np.broadcast_to(np.asarray(fn(x), dtype=np.float64), x.shape))

    @property
    def m(self) -> int:
        return self.values.size

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.m - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.m)

    def with_values(self, values: np.ndarray, singular_start: bool = False) -> UniformGrid1D:
        return UniformGrid1D(self.a, self.b, values, singular_start=singular_start)


@dataclass(frozen=True)
class PowerFunction:
    """``coefficient * (x - base_offset)**beta``."""

    base_offset: float = 0.0
    beta: float = 0.0
    coefficient: float = 1.0

    def __post_init__(self) -> None:
        if not self.beta > -1:
            raise DomainError(f"exponent must exceed -1 for integrability: {self.beta}")

    def __call__(self, x):
        s = np.asarray(x, dtype=np.float64) - self.base_offset
        if self.beta == 0:
            return self.coefficient * np.ones_like(s)
        return self.coefficient * np.power(np.maximum(s, 0.0), self.beta)


# }}}


# {{{ weights


def _power_second_difference(j: np.ndarray, p: float) -> np.ndarray:
    """``(j+1)^p - 2 j^p + (j-1)^p`` for ``j >= 1`` without cancellation blowup."""
    inv = 1.0 / j
    with np.errstate(divide="ignore"):
        up = np.expm1(p * np.log1p(inv))
        dn = np.expm1(p * np.log1p(-inv))
    return j**p * (up + dn)


def _power_difference(j: np.ndarray, p: float) -> np.ndarray:
    """``(j+1)^p - j^p`` for ``j >= 0``."""
    out = np.ones_like(j)
    pos = j > 0
    out[pos] = j[pos] ** p * np.expm1(p * np.log1p(1.0 / j[pos]))
    return out


def _readonly(*arrays: np.ndarray) -> tuple[np.ndarray, ...]:
    for ary in arrays:
        ary.setflags(write=False)
    return arrays


@lru_cache(maxsize=64)
def rl_weights(m: int, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Unit-step product-trapezoid weights ``(c, d)``.

    With ``h = 1`` the integral at node ``n`` is
    ``(sum_k c[n-k] f[k] + d[n] f[0]) / Gamma(alpha + 2)``.
    """
    p = alpha + 1.0
    j = np.arange(m, dtype=np.float64)

    c = np.empty(m)
    c[0] = 1.0
    c[1:] = _power_second_difference(j[1:], p)

    # a_{n,0} = (n-1)^p - (n - p) n^alpha
    a0 = np.empty(m)
    a0[0] = 0.0
    n = j[1:]
    with np.errstate(divide="ignore"):
        a0[1:] = n**alpha * (n * np.expm1(p * np.log1p(-1.0 / n)) + p)
    d = a0 - c
    d[0] = -1.0

    return _readonly(c, d)  # type: ignore[return-value]


@lru_cache(maxsize=64)
def rl_endpoint_weights(m: int, alpha: float) -> np.ndarray:
    """Unit-step weights of the integral at the last node, already divided by Gamma(alpha+2)."""
    c, d = rl_weights(m, alpha)
    w = c[::-1].copy()
    w[0] += d[-1]
    w /= gamma(alpha + 2.0)
    return _readonly(w)[0]


@lru_cache(maxsize=64)
def l1_weights(m: int, alpha: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Unit-step L1 weights ``b`` (already divided by Gamma(2-alpha)) and
    the starting corrections ``(w1, w2)`` for nodes ``1, ..., m-1``."""
    j = np.arange(m - 1, dtype=np.float64)
    b = _power_difference(j, 1.0 - alpha) / gamma(2.0 - alpha)

    # residual of the plain scheme on j^alpha, whose exact derivative is Gamma(1+alpha)
    dpow = _power_difference(j, alpha)
    l1 = kernels.toeplitz_apply_numpy(b, dpow)
    r = gamma(1.0 + alpha) - l1
    w2 = r / (2.0**alpha - 2.0)
    w1 = -2.0 * w2

    return _readonly(b, w1, w2)  # type: ignore[return-value]


# }}}


# {{{ axis-wise kernels


def _to_lines(values: np.ndarray, axis: int) -> tuple[np.ndarray, tuple[int, ...]]:
    moved = np.moveaxis(np.asarray(values, dtype=np.float64), axis, 0)
    return moved.reshape(moved.shape[0], -1), moved.shape


def _from_lines(lines: np.ndarray, shape: tuple[int, ...], axis: int) -> np.ndarray:
    return np.moveaxis(lines.reshape(shape), 0, axis)


def rl_integral_along(
    values: np.ndarray, h: float, alpha: float, axis: int = 0, backend: str | None = None
) -> np.ndarray:
    """Running RL integral of order *alpha* along *axis* (lower limit at index 0)."""
    lines, shape = _to_lines(values, axis)
    m = lines.shape[0]
    c, d = rl_weights(m, alpha)

    out = kernels.toeplitz_apply(c, lines, backend=backend)
    out += d[:, None] * lines[0][None, :]
    out *= h**alpha / gamma(alpha + 2.0)
    return _from_lines(out, shape, axis)


def rl_integral_endpoint(values: np.ndarray, h: float, alpha: float, axis: int = 0) -> np.ndarray:
    """RL integral of order *alpha* along *axis* evaluated at the far end only."""
    values = np.asarray(values, dtype=np.float64)
    w = rl_endpoint_weights(values.shape[axis], alpha)
    return h**alpha * np.tensordot(w, values, axes=([0], [axis]))


def _second_differences(lines: np.ndarray, h: float) -> np.ndarray:
    s = np.empty_like(lines)
    dd = np.diff(lines, axis=0)
    s[1:-1] = dd[1:] - dd[:-1]
    # one-sided, second order: 2 s_1 - s_2 at the left end, mirrored at the right
    s[0] = 2.0 * s[1] - s[2]
    s[-1] = 2.0 * s[-2] - s[-3]
    return s / h**2


def _caputo_l1(lines: np.ndarray, h: float, alpha: float, corrected: bool, backend) -> np.ndarray:
    m = lines.shape[0]
    b, w1, w2 = l1_weights(m, alpha)

    out = np.empty_like(lines)
    out[1:] = kernels.toeplitz_apply(b, np.diff(lines, axis=0), backend=backend)
    if not corrected:
        # the piecewise linear interpolant has a vanishing derivative at x = a
        out[1:] *= h ** (-alpha)
        out[0] = 0.0
        return out

    out[1:] += w1[:, None] * (lines[1] - lines[0])[None, :]
    out[1:] += w2[:, None] * (lines[2] - lines[0])[None, :]
    out[1:] *= h ** (-alpha)
    # at x = a use the limit of the local model f0 + c1 (x-a)^alpha + c2 (x-a)
    # that the starting weights are exact on: D f(a) = Gamma(1 + alpha) c1
    c1 = ((lines[2] - lines[0]) - 2.0 * (lines[1] - lines[0])) / (2.0**alpha - 2.0)
    out[0] = gamma(1.0 + alpha) * h ** (-alpha) * c1
    return out


def caputo_along(
    values: np.ndarray,
    h: float,
    alpha: float,
    axis: int = 0,
    *,
    corrected: bool = True,
    backend: str | None = None,
) -> np.ndarray:
    """Caputo derivative of order ``0 < alpha <= 2`` along *axis*."""
    if not 0 < alpha <= MAX_ORDER:
        raise OrderOutOfRangeError(f"Caputo order must lie in (0, 2]: {alpha}")

    lines, shape = _to_lines(values, axis)
    if lines.shape[0] < MIN_NODES:
        raise GridTooSmallError(f"need at least {MIN_NODES} nodes, got {lines.shape[0]}")

    if alpha == 1.0:
        out = np.gradient(lines, h, axis=0, edge_order=2)
    elif alpha == 2.0:
        out = _second_differences(lines, h)
    elif alpha < 1.0:
        corrected = corrected and alpha <= CORRECTION_MAX_ALPHA
        out = _caputo_l1(lines, h, alpha, corrected, backend)
    else:
        g = _second_differences(lines, h)
        out = rl_integral_along(g, h, 2.0 - alpha, axis=0, backend=backend)

    return _from_lines(out, shape, axis)


def _derivative_at_start(values: np.ndarray, h: float, order: int) -> np.ndarray:
    """One-sided 4-point estimates of ``f^(order)(a)`` along axis 0."""
    f = values
    if order == 0:
        return f[0]
    if order == 1:
        return (-11.0 * f[0] + 18.0 * f[1] - 9.0 * f[2] + 2.0 * f[3]) / (6.0 * h)
    if order == 2:
        return (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h**2
    raise ValueError(f"unsupported derivative order: {order}")


# }}}


# {{{ operators


def interior_max(values: np.ndarray) -> float:
    """Max-norm over the interior nodes ``1, ..., m-2``."""
    values = np.asarray(values)
    if values.size < 3:
        return 0.0
    return float(np.max(np.abs(values[1:-1])))


def rl_integral(
    f: UniformGrid1D, ord: FracOrder | float, *, backend: str | None = None
) -> UniformGrid1D:
    """Riemann-Liouville integral :math:`{}_aI^\\alpha_x f` at every node."""
    ord = as_order(ord)
    return f.with_values(rl_integral_along(f.values, f.h, ord.alpha, backend=backend))


def rl_integral_at_end(f: UniformGrid1D, ord: FracOrder | float) -> float:
    """:math:`{}_aI^\\alpha_b f`, the RL integral evaluated at the right end."""
    ord = as_order(ord)
    return float(rl_integral_endpoint(f.values, f.h, ord.alpha))


def caputo_derivative(
    f: UniformGrid1D,
    ord: FracOrder | float,
    *,
    corrected: bool = True,
    backend: str | None = None,
) -> UniformGrid1D:
    """Caputo derivative :math:`{}^C_aD^\\alpha_x f` for ``0 < alpha <= 2``.

    For ``0 < alpha < 1`` the L1 sum is corrected by two starting weights
    so that it is exact on ``(x - a)^alpha``; pass ``corrected=False`` for
    the plain L1 scheme. Orders above :data:`CORRECTION_MAX_ALPHA` always use
    the plain scheme. Integer orders use classical differences.
    """
    ord = as_order(ord)
    return f.with_values(
        caputo_along(f.values, f.h, ord.alpha, corrected=corrected, backend=backend)
    )


def rl_derivative_correction(f: UniformGrid1D, ord: FracOrder | float) -> UniformGrid1D:
    """Boundary terms ``sum_j (x-a)^(j-alpha) / Gamma(j-alpha+1) f^(j)(a)``.

    Node 0 carries a signed infinite sentinel when the sum is singular there.
    """
    ord = as_order(ord)
    if ord.is_integer:
        return f.with_values(np.zeros(f.m))

    s = f.x - f.a
    out = np.zeros(f.m)
    lead = 0.0
    for j in range(ord.n):
        dj = float(_derivative_at_start(f.values, f.h, j))
        out[1:] += dj * s[1:] ** (j - ord.alpha) / gamma(j - ord.alpha + 1.0)
        if lead == 0.0:
            lead = dj

    singular = lead != 0.0
    out[0] = math.copysign(math.inf, lead) if singular else 0.0
    return f.with_values(out, singular_start=singular)


def rl_derivative(f: UniformGrid1D, ord: FracOrder | float) -> UniformGrid1D:
    """Riemann-Liouville derivative, assembled as Caputo plus boundary terms."""
    ord = as_order(ord)
    if not 0 < ord.alpha < MAX_ORDER:
        raise OrderOutOfRangeError(f"RL derivative order must lie in (0, 2): {ord.alpha}")

    cap = caputo_derivative(f, ord)
    corr = rl_derivative_correction(f, ord)
    values = cap.values + corr.values
    if corr.singular_start:
        values[0] = corr.values[0]
    return f.with_values(values, singular_start=corr.singular_start)


# }}}


# {{{ power rules


def power_rule_integral(p: PowerFunction, ord: FracOrder | float, x):
    """Closed form of :math:`{}_aI^\\alpha_x\\, c (x - a)^\\beta`."""
    ord = as_order(ord)
    s = np.asarray(x, dtype=np.float64) - p.base_offset
    if np.any(s < 0):
        raise DomainError("power rule needs x >= base_offset")

    scale = p.coefficient * gamma(p.beta + 1.0) / gamma(p.beta + ord.alpha + 1.0)
    out = scale * s ** (p.beta + ord.alpha)
    return float(out) if out.ndim == 0 else out


def power_rule_caputo(p: PowerFunction, ord: FracOrder | float, x):
    """Closed form of :math:`{}^C_aD^\\alpha_x\\, c (x - a)^\\beta`.

    Integer powers below ``n`` are annihilated; non-integer powers at or
    below ``n - 1`` have no Caputo derivative of the usual kind.
    """
    ord = as_order(ord)
    s = np.asarray(x, dtype=np.float64) - p.base_offset
    if np.any(s < 0):
        raise DomainError("power rule needs x >= base_offset")

    beta = p.beta
    if beta <= ord.n - 1:
        if beta != int(beta):
            raise UnsupportedExponentError(
                f"non-integer exponent {beta} <= n - 1 = {ord.n - 1} is not supported"
            )
        out = np.zeros_like(s)
    else:
        scale = p.coefficient * gamma(beta + 1.0) / gamma(beta + 1.0 - ord.alpha)
        with np.errstate(divide="ignore"):
            out = scale * s ** (beta - ord.alpha)

    return float(out) if out.ndim == 0 else out


# }}}


# {{{ verifiers


def ftfc_left_inverse_residual(f: UniformGrid1D, ord: FracOrder | float) -> float:
    """Interior max-norm of ``D^alpha I^alpha f - f`` (Caputo after RL integral)."""
    ord = as_order(ord)
    if ord.alpha > MAX_ORDER:
        raise OrderOutOfRangeError(f"order must be <= 2: {ord.alpha}")
    back = caputo_derivative(rl_integral(f, ord), ord)
    return interior_max(back.values - f.values)


def newton_leibniz_residual(F: UniformGrid1D, ord: FracOrder | float) -> float:
    """``|I^alpha_b D^alpha F - (F(b) - F(a))|`` for ``0 < alpha <= 1``."""
    ord = as_order(ord)
    if ord.alpha > 1:
        raise OrderOutOfRangeError(
            f"order {ord.alpha} > 1: use ftfc_higher_residual instead"
        )
    lhs = rl_integral_at_end(caputo_derivative(F, ord), ord)
    return float(abs(lhs - (F.values[-1] - F.values[0])))


def ftfc_higher_residual(F: UniformGrid1D, ord: FracOrder | float) -> float:
    """Residual of the two-term Newton-Leibniz formula for ``1 < alpha <= 2``.

    ``F(b) - F(a) = I^alpha_b D^alpha F + (b - a) F'(a)``.
    """
    ord = as_order(ord)
    if not 1 < ord.alpha <= MAX_ORDER:
        raise OrderOutOfRangeError(f"order must lie in (1, 2]: {ord.alpha}")

    lhs = rl_integral_at_end(caputo_derivative(F, ord), ord)
    slope = float(_derivative_at_start(F.values, F.h, 1))
    return float(abs(F.values[-1] - F.values[0] - lhs - (F.b - F.a) * slope))


def rl_newton_leibniz_correction(f: UniformGrid1D, ord: FracOrder | float) -> tuple[float, float]:
    """Both sides of the Newton-Leibniz formula for the RL derivative.

    Returns ``(lhs, rhs)`` with ``lhs = I^alpha_b D^alpha_RL f`` and
    ``rhs = f(b) - (b - a)^(alpha - 1) / Gamma(alpha) * (I^(1 - alpha) f)(a+)``.

    The Caputo part of ``lhs`` is integrated numerically; the singular boundary
    term ``f(a) (x - a)^(-alpha) / Gamma(1 - alpha)`` is integrated exactly,
    which gives ``f(a)``. For sampled (hence bounded) data the limit
    ``(I^(1 - alpha) f)(a+)`` vanishes.
    """
    ord = as_order(ord)
    if not 0 < ord.alpha < 1:
        raise OrderOutOfRangeError(f"order must lie in (0, 1): {ord.alpha}")

    lhs = rl_integral_at_end(caputo_derivative(f, ord), ord) + float(f.values[0])

    # the running integral at node 0 is the a+ limit of the sampled data
    start = float(rl_integral(f, 1.0 - ord.alpha).values[0])
    rhs = float(f.values[-1]) - (f.b - f.a) ** (ord.alpha - 1.0) / gamma(ord.alpha) * start
    return lhs, rhs


def integral_semigroup_residual(
    f: UniformGrid1D, a1: FracOrder | float, a2: FracOrder | float
) -> float:
    """Interior max-norm of ``I^a1 I^a2 f - I^(a1 + a2) f``."""
    a1, a2 = as_order(a1), as_order(a2)
    lhs = rl_integral(rl_integral(f, a2), a1)
    rhs = rl_integral(f, a1.alpha + a2.alpha)
    return interior_max(lhs.values - rhs.values)


def caputo_semigroup_counterexample(
    ord: FracOrder | float = 0.7, m: int = 1025, f: UniformGrid1D | None = None
) -> tuple[UniformGrid1D, UniformGrid1D]:
    """Return ``(D^alpha D^alpha f, D^(2 alpha) f)`` for ``f(x) = x`` on ``[0, 1]``.

    The default ``m = 1025`` places ``x = 0.5`` on a node.
    """
    ord = as_order(ord)
    if not 0.5 < ord.alpha < 1:
        raise OrderOutOfRangeError(f"need 1 < 2 alpha < 2: {ord.alpha}")
    if f is None:
        f = UniformGrid1D.from_function(lambda x: x, 0.0, 1.0, m)

    twice = caputo_derivative(caputo_derivative(f, ord), ord)
    double = caputo_derivative(f, 2.0 * ord.alpha)
    return twice, double


def _fit_derivatives(g: UniformGrid1D, terms: int) -> list[np.ndarray]:
    x = g.x
    deg = min(terms + 2, g.m - 1)
    poly = np.polynomial.Polynomial.fit(x, g.values, deg)
    coef = np.abs(poly.convert().coef)
    scale = max(float(np.max(np.abs(g.values))), 1.0)
    if deg > terms and np.any(coef[terms + 1 :] > 1e-8 * scale):
        warnings.warn(
            f"g is not a polynomial of degree <= {terms}; the series is truncated",
            RuntimeWarning,
            stacklevel=3,
        )
    return [poly.deriv(j)(x) if j > 0 else g.values for j in range(terms + 1)]


def leibniz_series(
    f: UniformGrid1D, g: UniformGrid1D, ord: FracOrder | float, terms: int
) -> UniformGrid1D:
    """Truncated product rule ``sum_j binom(alpha, j) D^(alpha - j) f * D^j g``.

    ``D^(alpha - j)`` with a negative order is the RL integral of order
    ``j - alpha``. Derivatives of ``g`` come from a polynomial fit, so the
    series is exact only when ``g`` is a polynomial of degree ``<= terms``.
    """
    ord = as_order(ord)
    if f.m != g.m or f.a != g.a or f.b != g.b:
        raise ValueError("f and g must share one grid")

    dg = _fit_derivatives(g, terms)
    total = np.zeros(f.m)
    singular = False
    binom = 1.0
    for j in range(terms + 1):
        if j > 0:
            binom *= (ord.alpha - j + 1.0) / j
        if binom == 0.0:
            break

        order = ord.alpha - j
        if order > 0:
            op = rl_derivative(f, order)
            singular = singular or op.singular_start
            fj = op.values
        elif order < 0:
            fj = rl_integral(f, -order).values
        else:
            fj = f.values

        with np.errstate(invalid="ignore"):
            total[1:] += binom * fj[1:] * dg[j][1:]
            total[0] += binom * fj[0] * dg[j][0] if np.isfinite(fj[0]) else 0.0

    if singular:
        total[0] = math.inf
    return f.with_values(total, singular_start=singular)


# }}}
