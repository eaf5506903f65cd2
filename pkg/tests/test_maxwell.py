from __future__ import annotations

import math

import numpy as np
import pytest

from fracvec.errors import (
    DomainError,
    InstabilityError,
    InsufficientDataError,
    OrderOutOfRangeError,
    PreconditionError,
)
from fracvec.frac1d import FracOrder, UniformGrid1D, interior_max
from fracvec.fracvec3d import BoxDomain, ScalarField3D, VectorField3D, curl_alpha, div_alpha
from fracvec.maxwell import (
    EMState,
    KernelSpec,
    MaxwellParams,
    TimeSeries,
    calibrate_dt,
    caputo_from_convolution,
    charge_conservation_residual,
    dalembert_mode,
    evolve,
    field_energy,
    gauss_constraint_residuals,
    integral_charge_balance,
    manufactured_charge,
    maxwell_rhs,
    maxwell_step,
    mode_frames,
    read_snapshot,
    wave_1d_marching,
    wave_1d_wright_solution,
    wave_residual,
    wright_green_kernel,
    write_snapshot,
)

from oracles import MITTAG_LEFFLER, WRIGHT, caputo_power


def _zero(dom):
    return np.zeros(dom.shape)


# {{{ parameters


def test_params():
    p = MaxwellParams(2.0, 3.0, 1.5, (0.5, 0.6, 0.7, 0.8))
    assert p.v == pytest.approx(math.sqrt(4.5))
    assert p.alpha(4) == FracOrder(0.8)
    with pytest.raises(DomainError):
        MaxwellParams(0.0)
    with pytest.raises(OrderOutOfRangeError):
        MaxwellParams.uniform(1.2)


def test_kernel_spec():
    k = KernelSpec(0.5)
    assert k(np.array([-1.0, 0.0]))[0] == 0.0
    assert k(1.0) == pytest.approx(1 / math.gamma(0.5))
    with pytest.raises(OrderOutOfRangeError):
        KernelSpec(1.0)


# }}}


# {{{ constitutive convolution


def test_convolution_matches_caputo_for_square():
    g = UniformGrid1D.from_function(lambda x: x**2, 0.0, 1.0, 1024)
    conv, cap = caputo_from_convolution(g, KernelSpec(0.5))
    exact = caputo_power(2.0, 0.5, g.x)
    assert interior_max(conv.values - cap.values) <= 1e-2
    assert interior_max(conv.values - exact) <= 1e-2


def test_convolution_gap_shrinks():
    gaps = []
    for m in (128, 256, 512, 1024):
        g = UniformGrid1D.from_function(lambda x: x**2, 0.0, 1.0, m)
        conv, cap = caputo_from_convolution(g, KernelSpec(0.5))
        gaps.append(interior_max(conv.values - cap.values))
    assert all(b < a for a, b in zip(gaps, gaps[1:]))


def test_convolution_of_constant_and_near_one():
    g = UniformGrid1D.from_function(lambda x: 2.0 + 0 * x, 0.0, 1.0, 64)
    conv, cap = caputo_from_convolution(g, KernelSpec(0.5))
    assert np.max(np.abs(conv.values)) < 1e-12 and np.max(np.abs(cap.values)) < 1e-12
    g = UniformGrid1D.from_function(np.sin, 0.0, 1.0, 512)
    conv, cap = caputo_from_convolution(g, KernelSpec(0.99))
    # x^(1 - alpha) still differs visibly from 1 in the first few nodes
    away = g.x >= 0.1
    d1 = np.cos(g.x[away])
    assert np.max(np.abs(conv.values[away] - d1)) <= 0.05
    assert np.max(np.abs(cap.values[away] - d1)) <= 0.05


# }}}


# {{{ right-hand side and time stepping


def test_rhs_zero_state():
    dom = BoxDomain.cube(8)
    s = EMState.vacuum(VectorField3D.zeros(dom), VectorField3D.zeros(dom))
    dE, dB = maxwell_rhs(s, MaxwellParams.uniform(0.5))
    assert all(np.all(a == 0) for a in (*dE.arrays, *dB.arrays))


def test_rhs_manufactured_electric_field():
    dom = BoxDomain(((0, 1), (0, 1), (0, 1)), (256, 8, 8))
    X = dom.mesh()[0]
    E = VectorField3D.from_arrays(dom, [_zero(dom), X**2, _zero(dom)])
    s = EMState.vacuum(E, VectorField3D.zeros(dom))
    _, dB = maxwell_rhs(s, MaxwellParams.uniform(0.6))
    exact = -caputo_power(2.0, 0.6, dom.axes[0])
    assert np.max(np.abs(dB.arrays[2][1:-1, 3, 3] - exact[1:-1])) < 1e-3
    assert np.all(dB.arrays[0] == 0)


def test_zero_state_stays_zero():
    dom = BoxDomain.cube(8)
    s = EMState.vacuum(VectorField3D.zeros(dom), VectorField3D.zeros(dom))
    s1 = maxwell_step(s, MaxwellParams.uniform(0.7), 1e-3)
    assert s1.t == pytest.approx(1e-3)
    assert field_energy(s1) == 0.0


def _plane_wave_error(m: int) -> float:
    def G(s):
        return np.exp(-40.0 * (s - 0.6) ** 2)

    dom = BoxDomain(((0.0, 2.0), (0.0, 1.0), (0.0, 1.0)), (m, 8, 8))
    X = dom.mesh()[0]
    z = _zero(dom)
    s = EMState.vacuum(
        VectorField3D.from_arrays(dom, [z, G(X), z]),
        VectorField3D.from_arrays(dom, [z, z, G(X)]),
    )
    h = 2.0 / (m - 1)
    dt = 0.5 * h
    n = int(round(0.5 / dt))
    s1 = evolve(s, MaxwellParams.uniform(1.0), dt, n, hold=(0,))
    return float(np.max(np.abs(s1.B.arrays[2] - G(X - n * dt))))


def test_classical_plane_wave_second_order():
    errs = [_plane_wave_error(m) for m in (33, 65, 129, 257)]
    orders = np.log2(np.asarray(errs[:-1]) / errs[1:])
    assert np.all(orders > 1.5) and orders[-1] > 1.9


def _bump_state(dom, alpha):
    X, Y, Z = dom.mesh()
    bump = np.exp(-40.0 * ((X - 0.5) ** 2 + (Y - 0.5) ** 2 + (Z - 0.5) ** 2))
    A = VectorField3D.from_arrays(dom, [_zero(dom), _zero(dom), bump])
    return EMState.vacuum(curl_alpha(A, alpha), VectorField3D.zeros(dom))


def test_calibrated_run_stays_bounded():
    dom = BoxDomain.cube(10)
    p = MaxwellParams.uniform(0.8)
    s0 = _bump_state(dom, 0.8)
    cal = calibrate_dt(s0, p, steps=100, hold=())
    assert cal.dt > 0 and len(cal.probes) >= 2
    s1 = evolve(s0, p, 0.5 * cal.dt, 100, hold=())
    assert field_energy(s1) <= 4.0 * field_energy(s0)
    # constraints hold discretely and drift only by roundoff
    c0 = max(gauss_constraint_residuals(s0, p))
    c1 = max(gauss_constraint_residuals(s1, p))
    assert c1 <= 3.0 * max(c0, 1e-12)


def test_instability_detector():
    dom = BoxDomain.cube(10)
    s0 = _bump_state(dom, 0.5)
    with pytest.raises(InstabilityError):
        evolve(s0, MaxwellParams.uniform(0.5), 10.0, 5)
    with pytest.raises(ValueError):
        maxwell_step(s0, MaxwellParams.uniform(0.5), 0.0)


# }}}


# {{{ constraints and charge


def test_gauss_constraint_power_rule():
    dom = BoxDomain.cube(32)
    X, Y, Z = dom.mesh()
    E = VectorField3D.from_arrays(dom, [X, _zero(dom), _zero(dom)])
    g1 = 2.0
    rho = ScalarField3D(dom, X**0.5 / math.gamma(1.5) / g1)
    s = EMState(E, VectorField3D.zeros(dom), rho, VectorField3D.zeros(dom))
    r1, r2 = gauss_constraint_residuals(s, MaxwellParams(g1, 1.0, 1.0, (0.5, 1.0, 1.0, 1.0)))
    assert r1 < 1e-10 and r2 == 0.0

    E = VectorField3D.from_arrays(dom, [X, Y, Z])
    s = EMState(E, VectorField3D.zeros(dom), ScalarField3D(dom, np.full(dom.shape, 3.0 / g1)), VectorField3D.zeros(dom))
    assert gauss_constraint_residuals(s, MaxwellParams(g1))[0] < 1e-10


def test_charge_conservation_power_rule():
    dom = BoxDomain.cube(32)
    X = dom.mesh()[0]
    p = MaxwellParams(2.0, 1.0, 3.0, (0.5,) * 4)
    j = VectorField3D.from_arrays(dom, [X, _zero(dom), _zero(dom)])
    drho = ScalarField3D(dom, -(p.g3 / p.g1) * X**0.5 / math.gamma(1.5))
    s = EMState(VectorField3D.zeros(dom), VectorField3D.zeros(dom), ScalarField3D(dom, _zero(dom)), j)
    assert charge_conservation_residual(s, drho, p) < 1e-10


def test_charge_of_curl_current_vanishes():
    dom = BoxDomain.cube(16)
    B = dom.vector("sin|cos;exp|1|poly:0,1;cos|1|sin")
    j = curl_alpha(B, 0.5)
    s = EMState(VectorField3D.zeros(dom), VectorField3D.zeros(dom), ScalarField3D(dom, _zero(dom)), j)
    assert charge_conservation_residual(s, ScalarField3D(dom, _zero(dom)), MaxwellParams.uniform(0.5)) < 1e-10


def test_charge_precondition():
    dom = BoxDomain.cube(8)
    s = EMState.vacuum(VectorField3D.zeros(dom), VectorField3D.zeros(dom))
    p = MaxwellParams(1.0, 1.0, 1.0, (0.5, 0.5, 0.5, 0.7))
    with pytest.raises(PreconditionError):
        charge_conservation_residual(s, s.rho, p)
    with pytest.raises(PreconditionError):
        integral_charge_balance(s, s, p)


@pytest.mark.parametrize("alpha", [0.5, 0.8, 1.0])
def test_manufactured_charge(alpha):
    dom = BoxDomain.cube(24)
    p = MaxwellParams(1.5, 1.0, 2.0, (alpha,) * 4)
    mc = manufactured_charge(dom, "sin|cos;exp|1|poly:0,1;cos|1|sin", p)
    r = charge_conservation_residual(mc.states[1], mc.drho_dt, p)
    assert r <= 10.0 * mc.scheme_error
    dq, J = integral_charge_balance(*mc.states, p)
    assert abs(dq + J) <= 10.0 * mc.scheme_error


def test_static_charge_balance():
    dom = BoxDomain.cube(8)
    rho = dom.scalar("x")
    s0 = EMState(VectorField3D.zeros(dom), VectorField3D.zeros(dom), rho, VectorField3D.zeros(dom), 0.0)
    s1 = EMState(VectorField3D.zeros(dom), VectorField3D.zeros(dom), rho, VectorField3D.zeros(dom), 0.1)
    assert integral_charge_balance(s0, s1, MaxwellParams.uniform(0.5)) == (0.0, 0.0)


# }}}


# {{{ waves


def test_wave_residual_errors_and_static_field():
    dom = BoxDomain.cube(8)
    Z = VectorField3D.zeros(dom)
    p = MaxwellParams.uniform(0.5)
    assert wave_residual([Z, Z, Z], p, [0.0, 0.1, 0.2]) == 0.0
    with pytest.raises(InsufficientDataError):
        wave_residual([Z, Z], p, [0.0, 0.1])
    with pytest.raises(ValueError):
        wave_residual([Z, Z, Z], p, [0.0, 0.1, 0.3])


def test_wave_residual_dalembert_converges():
    res = []
    for m in (33, 65, 129):
        dom = BoxDomain(((0.0, 2.0), (0.0, 1.0), (0.0, 1.0)), (m, 8, 8))
        X = dom.mesh()[0]
        dt = 1.0 / (m - 1)
        times = [0.0, dt, 2 * dt]
        frames = [
            VectorField3D.from_arrays(dom, [_zero(dom), _zero(dom), np.exp(-40 * (X - 0.6 - t) ** 2)])
            for t in times
        ]
        res.append(wave_residual(frames, MaxwellParams.uniform(1.0), times))
    orders = np.log2(np.asarray(res[:-1]) / res[1:])
    assert np.all(orders > 1.5)


def test_mittag_leffler_mode_residual_converges():
    res = []
    for m in (16, 32, 64, 128):
        dom = BoxDomain(((0.0, 1.0), (0.0, 1.0), (0.0, 1.0)), (m, 8, 8))
        times = [0.0, 1e-3, 2e-3]
        frames = mode_frames(dom, 2.0, 0.7, 1.0, times)
        res.append(wave_residual(frames, MaxwellParams.uniform(0.7), times, layer=0.25))
    assert all(b < a for a, b in zip(res, res[1:]))
    assert res[-1] < 0.3 * res[0]


def test_dalembert_mode():
    x = np.linspace(0, 10, 101)
    for sign in (1, -1):
        got = dalembert_mode(2.0, sign, 1.0, 1.0, x)
        assert np.max(np.abs(got - np.exp(-sign * 2j * x))) <= 1e-9
    assert dalembert_mode(3.0, 1, 0.4, 2.0, np.array([0.0]))[0] == 1.0
    expected = next(e for a, b, z, e in MITTAG_LEFFLER if (a, b, z) == (0.5, 1.0, -1j))
    assert dalembert_mode(1.0, 1, 0.5, 1.0, np.array([1.0]))[0] == pytest.approx(expected, abs=1e-12)
    with pytest.raises(DomainError):
        dalembert_mode(100.0, 1, 1.0, 1.0, np.array([1.0]))


def test_wright_kernel_spot_value():
    expected = next(e for r, mu, z, e in WRIGHT if (r, mu, z) == (-0.5, 0.5, -1.0))
    # x = 1, v = 1, t = 1: (1/2) phi(-1/2, 1/2; -1)
    assert float(wright_green_kernel(0, 0.5, 1.0, 1.0, 1.0)) == pytest.approx(0.5 * expected, rel=1e-12)


def test_wright_kernel_has_unit_mass():
    t = np.linspace(-30, 30, 1201)
    G = wright_green_kernel(0, 0.4, 1.3, 0.7, t)
    assert np.trapezoid(G, t) == pytest.approx(1.0, abs=1e-3)


def test_wright_solution_of_zero_data():
    series = TimeSeries.sample(lambda t: 0 * t, -1, 1, 11)
    assert wave_1d_wright_solution(series, 0.4, 1.0, 0.5, 0.3) == 0.0
    with pytest.raises(DomainError):
        wave_1d_wright_solution(series, 0.4, 1.0, 0.0, 0.3)


def _pulse(t):
    return np.where(np.abs(t - 0.5) < 0.5, np.cos(np.pi * (t - 0.5)) ** 4, 0.0)


def test_wright_solution_matches_marching():
    series = TimeSeries.sample(_pulse, -2.0, 4.0, 1601)
    u = wave_1d_wright_solution(series, 0.4, 1.0, 0.5, 1.0)
    _, U = wave_1d_marching(series, 0.4, 1.0, 0.5, 201)
    ref = float(np.interp(1.0, series.times, U[-1]))
    assert abs(u - ref) <= 5e-2
    assert abs(u) > 0.05


def test_time_series_validation():
    with pytest.raises(InsufficientDataError):
        TimeSeries(np.arange(2.0), np.zeros(2))
    with pytest.raises(ValueError):
        TimeSeries(np.array([0.0, 1.0, 3.0]), np.zeros(3))


# }}}


def test_snapshot_round_trip(tmp_path):
    dom = BoxDomain(((0, 1), (0, 2), (0, 1)), (8, 9, 10))
    rng = np.random.default_rng(3)
    s = EMState(
        VectorField3D.from_arrays(dom, rng.standard_normal((3,) + dom.shape)),
        VectorField3D.from_arrays(dom, rng.standard_normal((3,) + dom.shape)),
        ScalarField3D(dom, rng.standard_normal(dom.shape)),
        VectorField3D.from_arrays(dom, rng.standard_normal((3,) + dom.shape)),
        0.25,
    )
    p = MaxwellParams(1.0, 2.0, 3.0, (0.5, 0.6, 0.7, 0.8))
    path = tmp_path / "frame.snap"
    write_snapshot(path, s, p)
    s2, p2 = read_snapshot(path)
    assert p2 == p and s2.t == s.t and s2.domain == dom
    for a, b in zip((*s.E.arrays, *s.B.arrays, s.rho.values, *s.j.arrays),
                    (*s2.E.arrays, *s2.B.arrays, s2.rho.values, *s2.j.arrays)):
        assert np.array_equal(a, b)
    assert path.read_bytes().startswith(b"FRACVEC-SNAPSHOT 1\n")
