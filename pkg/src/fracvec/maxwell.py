"""Fractional nonlocal Maxwell system, charge conservation and fractional waves.

The system is written in ``E`` and ``B`` with coupling constants ``g1, g2, g3``:

    Div^a1 E = g1 rho            Div^a3 B = 0
    dB/dt = -Curl^a2 E           dE/dt = g3 (g2 Curl^a4 B - j)

with ``v^2 = g2 g3``. Time integration is classical RK4 with the spatial
operators of :mod:`fracvec.fracvec3d`; there is no known stability bound, so
:func:`calibrate_dt` probes one empirically.

For ``alpha < 1`` the semi-discrete operator has eigenvalues with positive
real part (the squared Caputo matrix is not negative definite), so solutions
grow slowly at a rate of order ``v h^-alpha``. Runs are therefore short-time
and monitored by a growth detector.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import solve_banded

from fracvec.errors import (
    DomainError,
    InstabilityError,
    InsufficientDataError,
    OrderOutOfRangeError,
    PreconditionError,
)
from fracvec.frac1d import (
    FracOrder,
    UniformGrid1D,
    as_order,
    caputo_derivative,
    interior_max,
    l1_weights,
    rl_integral_along,
)
from fracvec.fracint import Face, flux_alpha, volume_alpha
from fracvec.fracvec3d import (
    BoxDomain,
    ScalarField3D,
    VectorField3D,
    curl_alpha,
    div_alpha,
    interior_max3d,
    nabla_squared,
)
from fracvec.registry import ScalarFieldSpec, VectorFieldSpec, parse_vector_field
from fracvec.special_functions import Z_MAX, gamma, mittag_leffler, wright

logger = logging.getLogger(__name__)

# {{{ parameters and state


@dataclass(frozen=True)
class MaxwellParams:
    g1: float = 1.0
    g2: float = 1.0
    g3: float = 1.0
    orders: tuple[FracOrder, FracOrder, FracOrder, FracOrder] = (
        FracOrder(1.0),
        FracOrder(1.0),
        FracOrder(1.0),
        FracOrder(1.0),
    )

    def __post_init__(self) -> None:
        for name in ("g1", "g2", "g3"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive: {getattr(self, name)}")
        orders = tuple(as_order(o) for o in self.orders)
        if len(orders) != 4:
            raise ValueError("four orders are required")
        for o in orders:
            if not 0 < o.alpha <= 1:
                raise OrderOutOfRangeError(f"Maxwell orders must lie in (0, 1]: {o.alpha}")
        object.__setattr__(self, "orders", orders)

    @classmethod
    def uniform(cls, alpha: float, g1: float = 1.0, g2: float = 1.0, g3: float = 1.0) -> MaxwellParams:
        return cls(g1, g2, g3, (FracOrder(alpha),) * 4)

    @property
    def v(self) -> float:
        return math.sqrt(self.g2 * self.g3)

    def alpha(self, i: int) -> FracOrder:
        """Order ``alpha_i`` for ``i = 1, ..., 4``."""
        return self.orders[i - 1]


@dataclass(frozen=True)
class EMState:
    E: VectorField3D
    B: VectorField3D
    rho: ScalarField3D
    j: VectorField3D
    t: float = 0.0

    def __post_init__(self) -> None:
        dom = self.E.domain
        if not (self.B.domain == dom and self.rho.domain == dom and self.j.domain == dom):
            raise ValueError("all fields of a state must share one domain")

    @property
    def domain(self) -> BoxDomain:
        return self.E.domain

    @classmethod
    def vacuum(cls, E: VectorField3D, B: VectorField3D, t: float = 0.0) -> EMState:
        dom = E.domain
        return cls(E, B, ScalarField3D(dom, np.zeros(dom.shape)), VectorField3D.zeros(dom), t)


@dataclass(frozen=True)
class KernelSpec:
    """Power-law kernel ``e(xi) = xi^-alpha / Gamma(1 - alpha)`` on ``0 < xi < x - a``.

    The kernel vanishes outside the causal window, so the convolution runs
    from the line's left end to the evaluation point.
    """

    alpha: FracOrder

    def __post_init__(self) -> None:
        alpha = as_order(self.alpha)
        if not 0 < alpha.alpha < 1:
            raise OrderOutOfRangeError(f"kernel order must lie in (0, 1): {alpha.alpha}")
        object.__setattr__(self, "alpha", alpha)

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=np.float64)
        safe = np.where(xi > 0, xi, 1.0)
        with np.errstate(divide="ignore"):
            return np.where(xi > 0, safe ** (-self.alpha.alpha), 0.0) / gamma(1.0 - self.alpha.alpha)


# }}}


# {{{ constitutive convolution


def caputo_from_convolution(
    E_line: UniformGrid1D, k: KernelSpec
) -> tuple[UniformGrid1D, UniformGrid1D]:
    """Return ``(int e(x - x') E'(x') dx', D^alpha E)`` on the grid.

    The convolution integrates the piecewise-linear interpolant of a
    finite-difference ``E'`` exactly against the kernel; the second grid is
    the package's Caputo scheme, which never forms ``E'``.
    """
    alpha = k.alpha.alpha
    dE = np.gradient(E_line.values, E_line.h, edge_order=2)
    conv = rl_integral_along(dE, E_line.h, 1.0 - alpha)
    return E_line.with_values(conv), caputo_derivative(E_line, k.alpha)


# }}}


# {{{ time evolution


def maxwell_rhs(s: EMState, p: MaxwellParams) -> tuple[VectorField3D, VectorField3D]:
    """``(dE/dt, dB/dt)``."""
    dB = -1.0 * curl_alpha(s.E, p.alpha(2))
    dE = p.g3 * (p.g2 * curl_alpha(s.B, p.alpha(4)) - s.j)
    return dE, dB


def _hold_mask(shape: tuple[int, int, int], axes: Sequence[int]) -> np.ndarray:
    mask = np.ones(shape)
    for ax in axes:
        idx = [slice(None)] * 3
        idx[ax] = 0
        mask[tuple(idx)] = 0.0
        idx[ax] = -1
        mask[tuple(idx)] = 0.0
    return mask


def _field_max(s: EMState) -> float:
    return max(float(np.max(np.abs(a))) for a in (*s.E.arrays, *s.B.arrays))


#: Growth factor per step that the instability detector tolerates.
GROWTH_LIMIT = 10.0


def maxwell_step(
    s: EMState, p: MaxwellParams, dt: float, *, hold: Sequence[int] = (0, 1, 2)
) -> EMState:
    """One classical RK4 step of ``(E, B)``; sources are frozen over the step.

    Nodes on the faces normal to the axes in *hold* keep their values.
    Raises :class:`~fracvec.errors.InstabilityError` when the field max-norm
    grows by more than :data:`GROWTH_LIMIT` in one step.
    """
    if not dt > 0:
        raise ValueError(f"time step must be positive: {dt}")
    mask = _hold_mask(s.domain.shape, hold)

    def rhs(E: VectorField3D, B: VectorField3D) -> tuple[VectorField3D, VectorField3D]:
        dE, dB = maxwell_rhs(replace(s, E=E, B=B), p)
        return dE.map(lambda a: a * mask), dB.map(lambda a: a * mask)

    E0, B0 = s.E, s.B

    def combine(y, a, b, c, d):
        return VectorField3D.from_arrays(
            y.domain,
            [
                y_ + dt / 6.0 * (a_ + 2.0 * b_ + 2.0 * c_ + d_)
                for y_, a_, b_, c_, d_ in zip(y.arrays, a.arrays, b.arrays, c.arrays, d.arrays)
            ],
        )

    try:
        k1 = rhs(E0, B0)
        k2 = rhs(E0 + 0.5 * dt * k1[0], B0 + 0.5 * dt * k1[1])
        k3 = rhs(E0 + 0.5 * dt * k2[0], B0 + 0.5 * dt * k2[1])
        k4 = rhs(E0 + dt * k3[0], B0 + dt * k3[1])
        E1 = combine(E0, k1[0], k2[0], k3[0], k4[0])
        B1 = combine(B0, k1[1], k2[1], k3[1], k4[1])
    except ValueError as exc:
        raise InstabilityError(f"non-finite fields at t={s.t + dt}") from exc

    out = replace(s, E=E1, B=B1, t=s.t + dt)
    before, after = _field_max(s), _field_max(out)
    if before > 0 and after > GROWTH_LIMIT * before:
        raise InstabilityError(
            f"field max-norm grew from {before:.3e} to {after:.3e} in one step at t={out.t:.4g}"
        )
    return out


def field_energy(s: EMState) -> float:
    """``1/2 sum (|E|^2 + |B|^2)`` times the cell volume."""
    h = s.domain.spacing
    total = sum(float(np.sum(a**2)) for a in (*s.E.arrays, *s.B.arrays))
    return 0.5 * total * h[0] * h[1] * h[2]


def evolve(
    s: EMState,
    p: MaxwellParams,
    dt: float,
    steps: int,
    *,
    hold: Sequence[int] = (0, 1, 2),
    callback: Callable[[EMState], None] | None = None,
) -> EMState:
    for _ in range(steps):
        s = maxwell_step(s, p, dt, hold=hold)
        if callback is not None:
            callback(s)
    return s


@dataclass(frozen=True)
class Calibration:
    dt: float
    #: (dt, energy growth factor or inf) for every probe
    probes: tuple[tuple[float, float], ...] = field(default_factory=tuple)


def calibrate_dt(
    s: EMState,
    p: MaxwellParams,
    *,
    steps: int = 100,
    dt0: float | None = None,
    growth: float = 4.0,
    max_doublings: int = 40,
    hold: Sequence[int] = (0, 1, 2),
) -> Calibration:
    """Largest ``dt`` of a doubling sequence whose *steps*-step run stays bounded.

    A probe passes when no instability is detected and the energy grows by
    at most *growth*.
    """
    h = min(s.domain.spacing)
    dt = dt0 if dt0 is not None else 1e-3 * h / max(p.v, 1e-300)
    e0 = field_energy(s)

    best = 0.0
    probes = []
    for _ in range(max_doublings):
        try:
            final = evolve(s, p, dt, steps, hold=hold)
            ratio = field_energy(final) / e0 if e0 > 0 else 0.0
        except InstabilityError:
            ratio = math.inf
        probes.append((dt, ratio))
        if not ratio <= growth:
            break
        best = dt
        dt *= 2.0

    if best == 0.0:
        raise InstabilityError(f"no stable time step found down to dt={probes[0][0]:.3e}")
    logger.info("calibrated dt=%.4e over %d steps (%d probes)", best, steps, len(probes))
    return Calibration(best, tuple(probes))


# }}}


# {{{ constraints and charge conservation


def gauss_constraint_residuals(s: EMState, p: MaxwellParams) -> tuple[float, float]:
    """Max-norms of ``Div^a1 E - g1 rho`` and ``Div^a3 B`` (one-node margin)."""
    r1 = div_alpha(s.E, p.alpha(1)).values - p.g1 * s.rho.values
    r2 = div_alpha(s.B, p.alpha(3)).values
    return interior_max3d(r1), interior_max3d(r2)


def _require_conserving(p: MaxwellParams) -> None:
    if p.alpha(1) != p.alpha(4):
        raise PreconditionError(
            f"charge conservation needs alpha_1 = alpha_4, got {p.alpha(1).alpha} and {p.alpha(4).alpha}"
        )


def charge_conservation_residual(s: EMState, drho_dt: ScalarField3D, p: MaxwellParams) -> float:
    """Max-norm of ``g1 d(rho)/dt + g3 Div^a1 j``."""
    _require_conserving(p)
    r = p.g1 * drho_dt.values + p.g3 * div_alpha(s.j, p.alpha(1)).values
    return interior_max3d(r)


def boundary_current(j: VectorField3D, p: MaxwellParams) -> float:
    """``g3`` times the outward fractional flux of ``j`` through the box faces."""
    dom = j.domain
    total = sum(
        flux_alpha(j, Face.of_box(dom, ax, side), p.alpha(1))
        for ax in range(3)
        for side in ("upper", "lower")
    )
    return p.g3 * total


def integral_charge_balance(s0: EMState, s1: EMState, p: MaxwellParams) -> tuple[float, float]:
    """``(dQ/dt, J)`` from two states at adjacent times.

    ``Q`` is the fractional volume integral of ``g1 rho``; ``J`` is evaluated
    with the current of the later state. Conservation means the sum vanishes.
    """
    _require_conserving(p)
    if not s1.t > s0.t:
        raise ValueError("states must be ordered in time")
    a = p.alpha(1)
    q0 = volume_alpha(p.g1 * s0.rho, a)
    q1 = volume_alpha(p.g1 * s1.rho, a)
    return (q1 - q0) / (s1.t - s0.t), boundary_current(s1.j, p)


@dataclass(frozen=True)
class ManufacturedCharge:
    """A charge/current pair that satisfies the conservation law in closed form."""

    states: tuple[EMState, EMState]
    drho_dt: ScalarField3D
    #: max-norm of the per-axis 1-D Caputo errors of the current's factors
    scheme_error: float


def _axis_caputo(spec: ScalarFieldSpec, domain: BoxDomain, axis: int, alpha: float):
    """Closed-form axis derivative of a separable field and its per-axis scheme error."""
    if spec.is_zero:
        return np.zeros(domain.shape), 0.0
    axes = domain.axes
    lo = domain.bounds[axis][0]
    factors = list(spec.factors)  # type: ignore[arg-type]
    f = factors[axis]
    line = np.broadcast_to(f(axes[axis]), axes[axis].shape)
    exact_line = np.broadcast_to(f.caputo(axes[axis], alpha, lo), axes[axis].shape)
    numeric_line = caputo_derivative(UniformGrid1D(lo, domain.bounds[axis][1], line), alpha).values

    others = 1.0
    parts = []
    for ax in range(3):
        if ax == axis:
            parts.append(exact_line)
        else:
            vals = np.broadcast_to(factors[ax](axes[ax]), axes[ax].shape)
            others *= float(np.max(np.abs(vals[1:-1])))
            parts.append(vals)
    err = interior_max(numeric_line - exact_line) * others
    return np.einsum("i,j,k->ijk", *parts), err


def manufactured_charge(
    domain: BoxDomain,
    j_key: str | VectorFieldSpec,
    p: MaxwellParams,
    t0: float = 0.0,
    dt: float = 1e-2,
) -> ManufacturedCharge:
    """Static current ``j`` with ``rho`` linear in time so that the law holds exactly.

    ``d(rho)/dt = -(g3 / g1) Div^a1 j`` is formed from closed-form Caputo
    derivatives of the registry factors of ``j``.
    """
    _require_conserving(p)
    spec = parse_vector_field(j_key) if isinstance(j_key, str) else j_key
    alpha = p.alpha(1).alpha

    div_exact = np.zeros(domain.shape)
    scheme_error = 0.0
    for ax, comp in enumerate(spec.components):
        d, err = _axis_caputo(comp, domain, ax, alpha)
        div_exact += d
        scheme_error = max(scheme_error, err)

    drho = ScalarField3D(domain, -(p.g3 / p.g1) * div_exact)
    j = domain.vector(spec)
    zero = VectorField3D.zeros(domain)
    rho0 = ScalarField3D(domain, np.zeros(domain.shape))
    s0 = EMState(zero, zero, rho0, j, t0)
    s1 = EMState(zero, zero, rho0 + dt * drho, j, t0 + dt)
    return ManufacturedCharge((s0, s1), drho, scheme_error)


# }}}


# {{{ fractional waves


def wave_residual(
    frames: Sequence[VectorField3D],
    p: MaxwellParams,
    times: Sequence[float],
    *,
    layer: float = 0.0,
) -> float:
    """Max-norm of ``d^2B/dt^2 - v^2 (D_W)^2 B`` with a second difference in time.

    The norm skips one node at every face and, when *layer* is positive, the
    nodes within distance *layer* of the lower end of each axis. Near that end
    the twice-applied L1 scheme has an O(1) error for fields with
    ``(x - a)^(2 alpha)`` terms, so the max-norm over the full box only
    converges at fixed distance from it.
    """
    a2, a3, a4 = p.alpha(2), p.alpha(3), p.alpha(4)
    if not a2 == a3 == a4:
        raise PreconditionError("the wave equation needs alpha_2 = alpha_3 = alpha_4")
    if len(frames) < 3:
        raise InsufficientDataError(f"need at least three frames, got {len(frames)}")
    t = np.asarray(times, dtype=np.float64)
    if t.shape != (len(frames),):
        raise ValueError("one time per frame is required")
    dt = np.diff(t)
    if not (dt[0] > 0 and np.allclose(dt, dt[0], rtol=1e-9, atol=0)):
        raise ValueError("frame times must be increasing and uniform")
    dt = float(dt[0])

    dom = frames[0].domain
    keep = np.ones(dom.shape, dtype=bool)
    for ax, (lo, _) in enumerate(dom.bounds):
        idx = [None, None, None]
        idx[ax] = slice(None)
        keep &= (dom.axes[ax] - lo >= layer)[tuple(idx)]

    worst = 0.0
    for i in range(1, len(frames) - 1):
        lap = nabla_squared(frames[i], a2)
        for ax in range(3):
            f = [fr.arrays[ax] for fr in frames[i - 1 : i + 2]]
            r = (f[2] - 2.0 * f[1] + f[0]) / dt**2 - p.v**2 * lap.arrays[ax]
            worst = max(worst, interior_max3d(np.where(keep, r, 0.0)))
    return worst


def dalembert_mode(
    omega: float, sign: int, alpha: FracOrder | float, v: float, x_grid
) -> np.ndarray:
    """Single-frequency factor ``E_alpha(-+ i omega x^alpha / v)`` of the split solutions.

    Multiplied by ``exp(-i omega t)`` it solves ``dB/dt = +-v D^alpha B`` for
    ``sign = +1`` and ``-1`` respectively; at ``alpha = 1`` it is
    ``exp(-+ i omega x / v)``.
    """
    alpha = as_order(alpha)
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    x = np.asarray(x_grid, dtype=np.float64)
    if np.any(x < 0):
        raise DomainError("the mode is defined for x >= 0")
    z = -sign * 1j * omega * x**alpha.alpha / v
    if np.any(np.abs(z) > Z_MAX):
        raise DomainError(f"|omega x^alpha / v| exceeds Z_MAX = {Z_MAX}")
    return np.asarray(mittag_leffler((alpha.alpha, 1.0), z.astype(complex)))


def mode_frames(
    domain: BoxDomain,
    omega: float,
    alpha: FracOrder | float,
    v: float,
    times: Sequence[float],
    sign: int = 1,
) -> list[VectorField3D]:
    """Frames of ``B = (0, 0, Re[E_alpha(-i omega x^alpha / v) e^(-i omega t)])``.

    The x-axis of *domain* must start at 0.
    """
    if domain.bounds[0][0] != 0.0:
        raise DomainError("mode frames need the x-interval to start at 0")
    # the mode solves the one-way equations; its square solves the wave equation
    # for either sign since (D^alpha)^2 E = (-i omega / v)^2 E = -omega^2 / v^2 E
    profile = dalembert_mode(omega, sign, alpha, v, domain.axes[0])
    ones = np.ones(domain.shape[1:])
    frames = []
    for t in times:
        bz = np.real(profile * np.exp(-1j * omega * t))
        zero = np.zeros(domain.shape)
        frames.append(VectorField3D.from_arrays(domain, [zero, zero, bz[:, None, None] * ones]))
    return frames


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled boundary data ``f(t)``."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.times, dtype=np.float64)
        f = np.asarray(self.values, dtype=np.float64)
        if t.ndim != 1 or t.shape != f.shape or t.size < 3:
            raise InsufficientDataError("a time series needs matching 1-D arrays of >= 3 samples")
        if not np.allclose(np.diff(t), t[1] - t[0], rtol=1e-9, atol=0):
            raise ValueError("time samples must be uniform")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", f)

    @classmethod
    def sample(cls, fn: Callable[[np.ndarray], np.ndarray], t0: float, t1: float, n: int) -> TimeSeries:
        t = np.linspace(t0, t1, n)
        return cls(t, np.broadcast_to(fn(t), t.shape))


def wright_green_kernel(k: int, alpha: float, v: float, x: float, t) -> np.ndarray:
    """``G_k(x, t) = (v / 2) x^(k - alpha) phi(-alpha, k + 1 - alpha; -v |t| x^-alpha)``.

    Its Fourier transform in ``t`` is ``x^k E_(2 alpha, k + 1)(-omega^2 x^(2 alpha) / v^2)``.
    """
    if not x > 0:
        raise DomainError(f"the kernel needs x > 0: {x}")
    z = -v * np.abs(np.asarray(t, dtype=np.float64)) * x ** (-alpha)
    return 0.5 * v * x ** (k - alpha) * wright((-alpha, k + 1.0 - alpha), z)


def wave_1d_wright_solution(
    f_k: TimeSeries | Sequence[TimeSeries],
    alpha: FracOrder | float,
    v: float,
    x: float,
    t: float,
) -> float:
    """``u(x, t) = sum_k int G_k(x, t - tau) f_k(tau) d tau`` by the trapezoid rule.

    Solves ``d^2u/dt^2 = v^2 D^(2 alpha)_x u`` on ``x > 0`` with
    ``D^k_x u(0, t) = f_k(t)``, ``k = 0, ..., ceil(2 alpha) - 1``. Data outside
    the sampled window are taken as zero.
    """
    alpha = as_order(alpha).alpha
    if not 0 < 2.0 * alpha < 2.0:
        raise OrderOutOfRangeError(f"need 0 < 2 alpha < 2: {alpha}")
    if not x > 0:
        raise DomainError(f"x must be positive: {x}")
    series = [f_k] if isinstance(f_k, TimeSeries) else list(f_k)
    n = math.ceil(2.0 * alpha)
    if len(series) > n:
        raise ValueError(f"at most {n} boundary series apply for alpha={alpha}")

    total = 0.0
    for k, fk in enumerate(series):
        if not np.any(fk.values):
            continue
        kernel = wright_green_kernel(k, alpha, v, x, t - fk.times)
        total += float(np.trapezoid(kernel * fk.values, fk.times))
    return total


def wave_1d_marching(
    f0: TimeSeries, alpha: FracOrder | float, v: float, x_max: float, nx: int
) -> tuple[np.ndarray, np.ndarray]:
    """Independent solve of ``D^(2 alpha)_x u = v^-2 d^2u/dt^2`` for ``2 alpha <= 1``.

    Marches in ``x`` with the L1 scheme of order ``2 alpha`` and a second
    difference in ``t`` (zero at the window ends); every step is one
    symmetric positive definite tridiagonal solve. Returns ``(x, u)`` with
    ``u`` of shape ``(nx, len(times))``.
    """
    beta = 2.0 * as_order(alpha).alpha
    if not 0 < beta <= 1:
        raise OrderOutOfRangeError(f"the marching solver needs 0 < 2 alpha <= 1: {beta / 2}")

    t = f0.times
    ht = t[1] - t[0]
    hx = x_max / (nx - 1)
    nt = t.size

    if beta < 1:
        b = np.asarray(l1_weights(nx, beta)[0])
    else:
        b = np.zeros(nx - 1)
        b[0] = 1.0
    c = hx ** (-beta)

    # c b0 u_n - v^-2 L u_n = c b0 u_{n-1} - c sum_{k < n-1} b_{n-1-k} (u_{k+1} - u_k)
    r = 1.0 / (v * ht) ** 2
    ab = np.zeros((3, nt))
    ab[0, 1:] = -r
    ab[1, :] = c * b[0] + 2.0 * r
    ab[2, :-1] = -r

    u = np.zeros((nx, nt))
    u[0] = f0.values
    du = np.zeros((nx - 1, nt))
    for n in range(1, nx):
        hist = b[n - 1 : 0 : -1] @ du[: n - 1] if n > 1 else 0.0
        rhs = c * b[0] * u[n - 1] - c * hist
        u[n] = solve_banded((1, 1), ab, rhs)
        du[n - 1] = u[n] - u[n - 1]

    return np.linspace(0.0, x_max, nx), u


# }}}


# {{{ snapshots

_MAGIC = "FRACVEC-SNAPSHOT 1"


def write_snapshot(path: str | Path, s: EMState, p: MaxwellParams) -> None:
    """Plain-text header (one JSON line) followed by raw little-endian float64 data.

    Arrays are written in C order as ``Ex, Ey, Ez, Bx, By, Bz, rho, jx, jy, jz``.
    """
    dom = s.domain
    header = {
        "bounds": [list(b) for b in dom.bounds],
        "resolution": list(dom.resolution),
        "t": s.t,
        "alpha": [o.alpha for o in p.orders],
        "g": [p.g1, p.g2, p.g3],
    }
    arrays = (*s.E.arrays, *s.B.arrays, s.rho.values, *s.j.arrays)
    with open(path, "wb") as outf:
        outf.write(f"{_MAGIC}\n{json.dumps(header, sort_keys=True)}\n".encode("ascii"))
        for a in arrays:
            outf.write(np.ascontiguousarray(a, dtype="<f8").tobytes())


def read_snapshot(path: str | Path) -> tuple[EMState, MaxwellParams]:
    with open(path, "rb") as inf:
        magic = inf.readline().decode("ascii").strip()
        if magic != _MAGIC:
            raise ValueError(f"not a snapshot file: {path}")
        header = json.loads(inf.readline().decode("ascii"))
        payload = inf.read()

    dom = BoxDomain(tuple(tuple(b) for b in header["bounds"]), tuple(header["resolution"]))
    size = int(np.prod(dom.shape))
    data = np.frombuffer(payload, dtype="<f8")
    if data.size != 10 * size:
        raise ValueError(f"snapshot payload has {data.size} values, expected {10 * size}")
    arrays = [data[i * size : (i + 1) * size].reshape(dom.shape).copy() for i in range(10)]

    g1, g2, g3 = header["g"]
    p = MaxwellParams(g1, g2, g3, tuple(FracOrder(a) for a in header["alpha"]))
    s = EMState(
        VectorField3D.from_arrays(dom, arrays[0:3]),
        VectorField3D.from_arrays(dom, arrays[3:6]),
        ScalarField3D(dom, arrays[6]),
        VectorField3D.from_arrays(dom, arrays[7:10]),
        float(header["t"]),
    )
    return s, p


# }}}
