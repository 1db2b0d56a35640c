"""Dormand-Prince 5(4) kernel for the self-expander ODE.

The ODE u'' = (1 + u'^2)(u - x u') is integrated in the variables

    p = u',   q = log(u - x u'),

which turns it into

    p' = (1 + p^2) exp(q),   q' = -x (1 + p^2).

For u(0) > 0 the quantity u - x u' stays positive, so the logarithm is
always defined; positivity and convexity (u'' = (1 + p^2) e^q) then hold by
construction instead of up to round-off.  u itself is recovered as
e^q + x p.
"""

import numpy as np
from numba import njit

# Dormand-Prince tableau
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
# difference between the 5th and embedded 4th order weights
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)

STATUS_OK = 0
STATUS_UNDERFLOW = 1


@njit(cache=True)
def _rhs(x, p, q):
    g = 1.0 + p * p
    return g * np.exp(q), -x * g


@njit(cache=True)
def _grow(arr, n, cap):
    out = np.empty(cap)
    out[:n] = arr[:n]
    return out


@njit(cache=True)
def integrate_log_form(p0, q0, x_max, tol, h_max, x_stop):
    """Integrate (p, q) from x = 0 to x_max.

    Error control is per unit step: every accepted step satisfies
    |err_i| <= tol * h * max(1, |y_i|).  ``x_stop`` (if inside the interval)
    is forced to be a grid node.

    Returns (xs, ps, qs, status).
    """
    cap = 256
    xs = np.empty(cap)
    ps = np.empty(cap)
    qs = np.empty(cap)
    x = 0.0
    p = p0
    q = q0
    xs[0] = x
    ps[0] = p
    qs[0] = q
    n = 1
    k1p, k1q = _rhs(x, p, q)
    h = min(1e-3, h_max)
    stop = x_stop if 0.0 < x_stop < x_max else x_max
    while x < x_max:
        target = stop if x < stop else x_max
        last = False
        if x + 1.01 * h >= target:
            h = target - x
            last = True
            if h <= 1e-14 * max(1.0, abs(x)):
                # remainder is round-off: snap the current node onto the target
                x = target
                xs[n - 1] = x
                continue
        elif h < 1e-14 * max(1.0, abs(x)):
            return xs[:n], ps[:n], qs[:n], STATUS_UNDERFLOW
        k2p, k2q = _rhs(x + _C2 * h, p + h * _A21 * k1p, q + h * _A21 * k1q)
        k3p, k3q = _rhs(x + _C3 * h,
                        p + h * (_A31 * k1p + _A32 * k2p),
                        q + h * (_A31 * k1q + _A32 * k2q))
        k4p, k4q = _rhs(x + _C4 * h,
                        p + h * (_A41 * k1p + _A42 * k2p + _A43 * k3p),
                        q + h * (_A41 * k1q + _A42 * k2q + _A43 * k3q))
        k5p, k5q = _rhs(x + _C5 * h,
                        p + h * (_A51 * k1p + _A52 * k2p + _A53 * k3p + _A54 * k4p),
                        q + h * (_A51 * k1q + _A52 * k2q + _A53 * k3q + _A54 * k4q))
        k6p, k6q = _rhs(x + h,
                        p + h * (_A61 * k1p + _A62 * k2p + _A63 * k3p + _A64 * k4p + _A65 * k5p),
                        q + h * (_A61 * k1q + _A62 * k2q + _A63 * k3q + _A64 * k4q + _A65 * k5q))
        pn = p + h * (_B1 * k1p + _B3 * k3p + _B4 * k4p + _B5 * k5p + _B6 * k6p)
        qn = q + h * (_B1 * k1q + _B3 * k3q + _B4 * k4q + _B5 * k5q + _B6 * k6q)
        k7p, k7q = _rhs(x + h, pn, qn)
        ep = h * (_E1 * k1p + _E3 * k3p + _E4 * k4p + _E5 * k5p + _E6 * k6p + _E7 * k7p)
        eq = h * (_E1 * k1q + _E3 * k3q + _E4 * k4q + _E5 * k5q + _E6 * k6q + _E7 * k7q)
        err = max(abs(ep) / max(1.0, abs(pn)), abs(eq) / max(1.0, abs(qn))) / (tol * h)
        if err <= 1.0:
            x = target if last else x + h
            p = pn
            q = qn
            k1p = k7p
            k1q = k7q
            if n == cap:
                cap *= 2
                xs = _grow(xs, n, cap)
                ps = _grow(ps, n, cap)
                qs = _grow(qs, n, cap)
            xs[n] = x
            ps[n] = p
            qs[n] = q
            n += 1
        # per-unit-step error scales like h^4
        fac = 0.9 * (1.0 / max(err, 1e-12)) ** 0.25
        h = min(h_max, h * min(5.0, max(0.2, fac)))
    return xs[:n], ps[:n], qs[:n], STATUS_OK
