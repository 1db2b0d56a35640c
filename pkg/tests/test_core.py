import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from expander_net.core import (LAMBDA, IvpData, asymptotic_slope, integrate_ivp, ode_rhs,
                               scale_network_time, slope_error_bound)
from expander_net.errors import DomainTooShort, NonpositiveTime
from expander_net.geometry import HalfLine, PlaneCurve

# Asymptotic slopes from fixed-step RK4 on (u, u') with 20000..80000 steps on
# [0, 8] and from scipy's DOP853 at rtol 1e-13; the runs agree to 2e-12.
A_HALF = 0.6505346016985917
A_ONE = 1.4296062432171932
A_TWO = 3.664145316728342


def test_ode_rhs():
    assert ode_rhs(0.0, 1.0, 0.0) == 1.0
    assert ode_rhs(2.0, 3.0, 1.0) == pytest.approx(2.0 * (3.0 - 2.0))


@pytest.mark.parametrize("h, a", [(0.5, A_HALF), (1.0, A_ONE), (2.0, A_TWO)])
def test_slope_matches_oracle(h, a):
    sol = integrate_ivp(IvpData(h))
    assert asymptotic_slope(sol) == pytest.approx(a, abs=1e-10)


def test_slope_ordering():
    assert integrate_ivp(IvpData(2.0)).a > integrate_ivp(IvpData(1.0)).a


def test_tolerance_ladder_error_decreases():
    errs = [abs(integrate_ivp(IvpData(1.0), tol=t).a - A_ONE) for t in (1e-6, 1e-8, 1e-10)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-10


def test_zero_height_is_exact_line():
    sol = integrate_ivp(IvpData(0.0, 0.3))
    assert sol.a == 0.3
    assert sol.u(5.0) == pytest.approx(1.5, abs=0.0)


def test_negative_height_is_mirror_image():
    pos = integrate_ivp(IvpData(1.0, 0.2))
    neg = integrate_ivp(IvpData(-1.0, -0.2))
    x = np.linspace(0.0, 8.0, 33)
    assert np.array_equal(neg.u(x), -pos.u(x))
    assert neg.a == -pos.a


def test_dense_output_matches_nodes_and_line_tail():
    sol = integrate_ivp(IvpData(1.0))
    assert np.allclose(sol.u(sol.x_grid), sol.u_values, rtol=0, atol=1e-14)
    x = 20.0
    assert sol.u(x) == pytest.approx(sol.u_values[-1] + sol.a * (x - sol.x_max))
    with pytest.raises(ValueError):
        sol.u(-1.0)


def test_gaussian_decay_certificate():
    for h in (0.5, 1.0, 2.0):
        sol = integrate_ivp(IvpData(h))
        x = sol.x_grid
        i1 = int(np.searchsorted(x, 1.0))
        assert x[i1] == 1.0  # forced node
        m = x >= 1.0
        bound = sol.w_values[i1] * np.exp(-(x[m] ** 2 - 1) / 2) * (1 + 1e-6)
        assert np.all(sol.w_values[m] <= bound)
        assert sol.decay_certificate <= sol.w_values[i1] * (1 + 1e-6)
        assert slope_error_bound(sol) < 1e-12


def test_short_domain_rejected():
    with pytest.raises(DomainTooShort):
        asymptotic_slope(integrate_ivp(IvpData(1.0), x_max=3.0))


def test_invalid_inputs():
    with pytest.raises(ValueError):
        IvpData(float("inf"))
    with pytest.raises(ValueError):
        integrate_ivp(IvpData(1.0), tol=0.0)


def test_scaling_law_and_time_scaling():
    assert LAMBDA(0.5) == 1.0
    assert LAMBDA(2.0) == pytest.approx(2.0)
    c = PlaneCurve(np.array([[1.0, 1.0], [2.0, 3.0]]), np.array([[1.0, 0.0], [0.0, 1.0]]),
                   HalfLine(0.0), 0.0, 0.0)
    assert np.allclose(scale_network_time(c, 2.0).vertices, 2.0 * c.vertices)
    with pytest.raises(NonpositiveTime):
        scale_network_time(c, 0.0)


@settings(max_examples=25, deadline=None)
@given(h=st.floats(0.05, 3.0), s=st.floats(-1.0, 1.0))
def test_convex_and_secant_decreasing(h, s):
    tol = 1e-10
    sol = integrate_ivp(IvpData(h, s), tol=tol)
    # positivity of u - x u' is carried by its logarithm; e^q itself underflows far out
    assert np.all(np.isfinite(sol.log_w_values))
    assert np.all(sol.upp_values >= 0)
    assert np.all(sol.upp_values[sol.log_w_values > -700] > 0)
    x = np.linspace(0.01, 8.0, 400)
    assert np.all(np.diff(sol.u(x) / x) <= 10 * tol)


@settings(max_examples=15, deadline=None)
@given(h1=st.floats(0.05, 3.0), dh=st.floats(0.01, 1.0), s=st.floats(-1.0, 1.0))
def test_height_monotonicity(h1, dh, s):
    tol = 1e-10
    lo, hi = integrate_ivp(IvpData(h1, s)), integrate_ivp(IvpData(h1 + dh, s))
    x = np.linspace(0.0, 8.0, 200)
    d = hi.u(x) - lo.u(x)
    assert np.all(d > -10 * tol)
    assert np.all(np.diff(d) >= -10 * tol)
    assert hi.a > lo.a
