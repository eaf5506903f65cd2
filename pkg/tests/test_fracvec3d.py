from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracvec.errors import OrderOutOfRangeError
from fracvec.fracvec3d import (
    BoxDomain,
    ScalarField3D,
    VectorField3D,
    caputo_square_vs_double_order,
    classical_div,
    classical_residuals,
    curl_alpha,
    curl_grad_residual,
    div_alpha,
    div_curl_residual,
    double_curl_residual,
    grad_alpha,
    interior_max3d,
    leibniz_violation_gap,
    partial_alpha,
)
from fracvec.registry import SCALAR_FIELD_KEYS, VECTOR_FIELD_KEYS

from oracles import CAPUTO_TWICE_07_AT_HALF, LEIBNIZ_GAP_HALF, caputo_power


def test_domain_basics():
    dom = BoxDomain(((0, 1), (0, 2), (1, 2)), (9, 17, 9))
    assert dom.shape == (9, 17, 9)
    assert dom.spacing == pytest.approx((0.125, 0.125, 0.125))
    X, Y, Z = dom.mesh()
    assert X.shape == dom.shape and Z.min() == 1.0


def test_field_arithmetic():
    dom = BoxDomain.cube(8)
    f = dom.scalar("x")
    g = (f + f) * 0.5 - f
    assert np.all(g.values == 0)
    F = dom.vector("x;y;z")
    assert np.allclose((2.0 * F - F).arrays[1], F.arrays[1])


def test_non_finite_values_rejected():
    dom = BoxDomain.cube(8)
    with pytest.raises(ValueError):
        ScalarField3D(dom, np.full(dom.shape, np.nan))


@pytest.mark.parametrize("alpha", [0.5, 0.8])
def test_partial_of_power(alpha):
    dom = BoxDomain(((0, 1), (0, 1), (0, 1)), (512, 8, 8))
    f = dom.scalar("poly:0,0,1")
    d = partial_alpha(f.values, dom, 0, alpha)
    exact = caputo_power(2.0, alpha, dom.axes[0])
    assert np.max(np.abs(d[1:-1, 3, 3] - exact[1:-1])) < 1e-3


def test_gradient_divergence_of_linear_fields():
    dom = BoxDomain.cube(64)
    F = dom.vector("x;y;z")
    div = div_alpha(F, 0.5)
    X, Y, Z = dom.mesh()
    exact = caputo_power(1.0, 0.5, X) + caputo_power(1.0, 0.5, Y) + caputo_power(1.0, 0.5, Z)
    assert interior_max3d(div.values - exact) < 1e-3
    G = grad_alpha(dom.scalar("y"), 1.0)
    assert np.allclose(G.arrays[1], 1.0) and np.allclose(G.arrays[0], 0.0)


def test_curl_of_rotation():
    dom = BoxDomain.cube(16)
    # F = (-y, x, 0) has classical curl (0, 0, 2)
    F = VectorField3D.from_arrays(dom, [-dom.mesh()[1], dom.mesh()[0], np.zeros(dom.shape)])
    C = curl_alpha(F, 1.0)
    assert np.allclose(C.arrays[2], 2.0) and np.allclose(C.arrays[0], 0.0)


def test_vector_orders_limited_to_unit_interval():
    dom = BoxDomain.cube(8)
    with pytest.raises(OrderOutOfRangeError):
        grad_alpha(dom.scalar("x"), 1.5)


@pytest.mark.parametrize("alpha", [0.5, 1.0])
@pytest.mark.parametrize("key", SCALAR_FIELD_KEYS)
def test_curl_grad_identity(alpha, key):
    dom = BoxDomain.cube(12)
    assert curl_grad_residual(dom.scalar(key), alpha) < 1e-10


@pytest.mark.parametrize("alpha", [0.5, 1.0])
@pytest.mark.parametrize("key", VECTOR_FIELD_KEYS)
def test_div_curl_and_double_curl(alpha, key):
    dom = BoxDomain.cube(12)
    F = dom.vector(key)
    assert div_curl_residual(F, alpha) < 1e-10
    assert double_curl_residual(F, alpha) < 1e-10


@settings(max_examples=10, deadline=None)
@given(st.floats(0.1, 1.0), st.integers(0, 2**31 - 1))
def test_identities_hold_for_random_fields(alpha, seed):
    dom = BoxDomain.cube(8)
    rng = np.random.default_rng(seed)
    F = VectorField3D.from_arrays(dom, rng.standard_normal((3,) + dom.shape))
    scale = max(np.max(np.abs(a)) for a in F.arrays) * dom.spacing[0] ** (-2 * alpha)
    assert div_curl_residual(F, alpha) <= 1e-12 * scale
    assert double_curl_residual(F, alpha) <= 1e-12 * scale


def test_classical_reduction():
    dom = BoxDomain.cube(16)
    F = dom.vector("sin|cos;exp|1|poly:0,1;cos|1|sin")
    f = dom.scalar("sin|exp|cos")
    ref = classical_residuals(F, f)
    assert np.allclose(div_alpha(F, 1.0).values, classical_div(F).values)
    assert div_curl_residual(F, 1.0) <= 2 * ref["div_curl"] + 1e-13
    assert curl_grad_residual(f, 1.0) <= 2 * ref["curl_grad"] + 1e-13


def test_caputo_square_is_not_double_order():
    twice, double = caputo_square_vs_double_order("x", 0.7, 1025)
    assert twice.values[512] == pytest.approx(CAPUTO_TWICE_07_AT_HALF, abs=5e-2)
    assert abs(double.values[512]) < 5e-2


def test_leibniz_gap():
    dom = BoxDomain.cube(64)
    x = dom.scalar("x")
    gap = leibniz_violation_gap(x, x, 0.5)
    assert gap == pytest.approx(LEIBNIZ_GAP_HALF, abs=5e-2)
    assert leibniz_violation_gap(x, x, 1.0) < 1e-10
