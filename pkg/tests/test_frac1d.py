from __future__ import annotations

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracvec.errors import (
    DomainError,
    GridTooSmallError,
    OrderOutOfRangeError,
    UnsupportedExponentError,
)
from fracvec.frac1d import (
    FracOrder,
    PowerFunction,
    UniformGrid1D,
    caputo_derivative,
    caputo_semigroup_counterexample,
    ftfc_higher_residual,
    ftfc_left_inverse_residual,
    integral_semigroup_residual,
    interior_max,
    leibniz_series,
    newton_leibniz_residual,
    power_rule_caputo,
    power_rule_integral,
    rl_derivative,
    rl_integral,
    rl_integral_at_end,
    rl_newton_leibniz_correction,
)
from fracvec.special_functions import mittag_leffler

from oracles import CAPUTO_TWICE_07_AT_HALF, caputo_power, rl_power


def grid(fn, m=256, a=0.0, b=1.0):
    return UniformGrid1D.from_function(fn, a, b, m)


# {{{ types


def test_order_validation():
    assert FracOrder(1.5).n == 2
    assert FracOrder(2.0).is_integer
    for bad in (0.0, -1.0, math.inf, math.nan):
        with pytest.raises(OrderOutOfRangeError):
            FracOrder(bad)


def test_grid_validation():
    with pytest.raises(GridTooSmallError):
        UniformGrid1D(0.0, 1.0, np.zeros(4))
    with pytest.raises(DomainError):
        UniformGrid1D(1.0, 1.0, np.zeros(16))
    g = grid(np.sin, 11)
    assert g.h == pytest.approx(0.1)
    assert not g.values.flags.writeable


def test_power_function_rejects_nonintegrable():
    with pytest.raises(DomainError):
        PowerFunction(beta=-1.0)


# }}}


# {{{ power rules


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8, 1.4])
@pytest.mark.parametrize("beta", [0.0, 1.0, 2.0, 2.5])
def test_rl_integral_power_rule(alpha, beta, backend):
    m = 1024
    g = grid(lambda x: x**beta, m)
    got = rl_integral(g, alpha, backend=backend).values
    exact = rl_power(beta, alpha, g.x)
    assert interior_max(got - exact) <= 1e-4 * np.max(np.abs(exact))


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8])
@pytest.mark.parametrize("beta", [1.0, 2.0, 3.0])
def test_caputo_power_rule(alpha, beta, backend):
    g = grid(lambda x: x**beta, 1024)
    got = caputo_derivative(g, alpha, backend=backend).values
    exact = caputo_power(beta, alpha, g.x)
    assert interior_max(got - exact) <= 1e-3 * np.max(np.abs(exact))


def test_caputo_of_constant_vanishes(backend):
    g = grid(lambda x: 3.0 + 0 * x, 128)
    for alpha in (0.2, 0.9, 1.0, 1.5, 2.0):
        assert np.max(np.abs(caputo_derivative(g, alpha, backend=backend).values)) < 1e-10


@pytest.mark.parametrize("alpha", [1.3, 1.7])
def test_caputo_high_order(alpha):
    g = grid(lambda x: x**3, 1024)
    got = caputo_derivative(g, alpha).values
    exact = caputo_power(3.0, alpha, g.x)
    assert interior_max(got - exact) <= 1e-3 * np.max(np.abs(exact))


def test_closed_form_rules_agree_with_oracle():
    x = np.linspace(0, 2, 9)
    p = PowerFunction(0.0, 1.5, 2.0)
    assert np.allclose(power_rule_integral(p, 0.4, x), 2.0 * rl_power(1.5, 0.4, x))
    assert np.allclose(power_rule_caputo(p, 0.4, x[1:]), 2.0 * caputo_power(1.5, 0.4, x[1:]))
    assert np.all(power_rule_caputo(PowerFunction(0.0, 1.0), 1.5, x) == 0)
    with pytest.raises(UnsupportedExponentError):
        power_rule_caputo(PowerFunction(0.0, 0.5), 1.5, x)


def test_caputo_fixed_point_of_mittag_leffler():
    g = grid(lambda x: mittag_leffler((0.5, 1.0), np.sqrt(x)), 1024)
    assert interior_max(caputo_derivative(g, 0.5).values - g.values) <= 1e-2


def test_uncorrected_l1_is_worse_on_mittag_leffler():
    g = grid(lambda x: mittag_leffler((0.5, 1.0), np.sqrt(x)), 256)
    corrected = interior_max(caputo_derivative(g, 0.5).values - g.values)
    plain = interior_max(caputo_derivative(g, 0.5, corrected=False).values - g.values)
    assert corrected < 0.1 * plain


# }}}


# {{{ RL derivative


def test_rl_derivative_of_constant_is_singular_power():
    g = grid(lambda x: 1.0 + 0 * x, 512)
    d = rl_derivative(g, 0.5)
    assert d.singular_start and math.isinf(d.values[0])
    exact = g.x[1:] ** -0.5 / math.gamma(0.5)
    assert np.allclose(d.values[1:], exact, rtol=1e-8)


def test_rl_and_caputo_coincide_when_data_vanish_at_start():
    g = grid(lambda x: x**2, 256)
    assert np.allclose(rl_derivative(g, 0.6).values[1:], caputo_derivative(g, 0.6).values[1:], atol=1e-6)


# }}}


# {{{ fundamental theorem


@pytest.mark.parametrize("fn", [lambda x: x, lambda x: x**2, np.sin])
def test_ftfc_residuals_converge(fn):
    res = [ftfc_left_inverse_residual(grid(fn, m), 0.5) for m in (128, 256, 512, 1024)]
    assert res[-1] <= 5e-3
    order = -np.polyfit(np.log([128, 256, 512, 1024]), np.log(res), 1)[0]
    assert order >= 0.8
    res = [newton_leibniz_residual(grid(fn, m), 0.5) for m in (128, 256, 512, 1024)]
    assert res[-1] <= 5e-3
    assert all(b < a for a, b in zip(res, res[1:]))


def test_newton_leibniz_order_guard():
    with pytest.raises(OrderOutOfRangeError):
        newton_leibniz_residual(grid(np.sin), 1.5)


def test_ftfc_higher():
    assert ftfc_higher_residual(grid(lambda x: x**3, 1024), 1.5) < 1e-4
    with pytest.raises(OrderOutOfRangeError):
        ftfc_higher_residual(grid(np.sin), 0.5)


def test_rl_integral_at_end_matches_full_operator():
    g = grid(np.exp, 200)
    assert rl_integral_at_end(g, 0.7) == pytest.approx(rl_integral(g, 0.7).values[-1], rel=1e-12)


def test_rl_correction_identity():
    lhs, rhs = rl_newton_leibniz_correction(grid(lambda x: 1.0 + x, 1024), 0.5)
    assert abs(lhs - rhs) <= 5e-3


# }}}


# {{{ semigroups and Leibniz


@settings(max_examples=15, deadline=None)
@given(st.floats(0.1, 1.5), st.floats(0.1, 1.5))
def test_integral_semigroup(a1, a2):
    assert integral_semigroup_residual(grid(lambda x: x**2, 512), a1, a2) <= 1e-5


def test_caputo_semigroup_fails():
    twice, double = caputo_semigroup_counterexample(0.7, 1025)
    i = 512
    assert twice.x[i] == 0.5
    assert twice.values[i] == pytest.approx(CAPUTO_TWICE_07_AT_HALF, abs=5e-2)
    assert abs(double.values[i]) <= 5e-2


def test_leibniz_series_exact_for_linear_factor():
    x = grid(lambda s: s, 256)
    series = leibniz_series(x, x, 0.5, terms=1)
    exact = 2 * x.x[1:] ** 1.5 / math.gamma(2.5)
    assert np.allclose(series.values[1:], exact, atol=1e-10)


def test_leibniz_series_warns_on_truncation():
    f = grid(np.exp, 64)
    with pytest.warns(RuntimeWarning):
        leibniz_series(f, grid(np.sin, 64), 0.5, terms=1)


def test_leibniz_series_needs_common_grid():
    with pytest.raises(ValueError):
        leibniz_series(grid(np.sin, 64), grid(np.sin, 65), 0.5, terms=1)


# }}}


@pytest.mark.parametrize("alpha", [0.96, 0.999, 1 - 1e-12, 0.9999999999999999])
def test_caputo_stays_bounded_near_one(alpha):
    g = UniformGrid1D.from_function(np.sin, 0.0, 1.0, 64)
    d = caputo_derivative(g, alpha).values
    # the exact derivative lies between 0 and 1 on [0, 1]
    assert np.all(np.abs(d) <= 1.05)
    assert abs(d[-1] - math.cos(1.0)) < 0.05
