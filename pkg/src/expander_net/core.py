"""Self-expander ODE: integration, dense output and asymptotic slope.

A graph y = u(x) expands homothetically under curve shortening flow, in the
normalization where the profile is taken at t = 1/2, iff

    u'' = (1 + u'^2) (u - x u').

Solutions with u(0) = h > 0 are strictly convex, u - x u' decays like a
Gaussian and u(x) - a x -> 0 for an asymptotic slope a.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._dopri import STATUS_UNDERFLOW, integrate_log_form
from .errors import DomainTooShort, NonpositiveTime, StepSizeUnderflow
from .geometry import PlaneCurve

DEFAULT_X_MAX = 8.0
DEFAULT_TOL = 1e-10
# node spacing cap, keeps the Hermite interpolant accurate in flat tails
MAX_STEP = 0.1
MIN_SLOPE_DOMAIN = 4.0


def ode_rhs(x: float, u: float, up: float) -> float:
    """Second derivative u'' prescribed by the self-expander equation."""
    return (1.0 + up * up) * (u - x * up)


@dataclass(frozen=True)
class IvpData:
    """Initial height h = u(0) and slope s = u'(0)."""

    h: float
    s: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.h) and math.isfinite(self.s)):
            raise ValueError(f"initial data must be finite, got h={self.h!r}, s={self.s!r}")


@dataclass(frozen=True)
class ScalingLaw:
    """Homothety factor lambda(t) = sqrt(2 t) relative to the profile at t0 = 1/2."""

    t0: float = 0.5

    def __call__(self, t: float) -> float:
        if t < 0:
            raise NonpositiveTime(f"time must be nonnegative, got {t}")
        return math.sqrt(2.0 * t)


LAMBDA = ScalingLaw()


def _hermite5(x0, x1, y0, y1, d0, d1, s0, s1, x, deriv=0):
    """Quintic Hermite interpolant (value, slope and curvature at both ends)."""
    H = x1 - x0
    t = (x - x0) / H
    if deriv == 0:
        t2 = t * t
        t3 = t2 * t
        t4 = t3 * t
        t5 = t4 * t
        h00 = 1 - 10 * t3 + 15 * t4 - 6 * t5
        h10 = t - 6 * t3 + 8 * t4 - 3 * t5
        h20 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5)
        h01 = 10 * t3 - 15 * t4 + 6 * t5
        h11 = -4 * t3 + 7 * t4 - 3 * t5
        h21 = 0.5 * (t3 - 2 * t4 + t5)
        return (h00 * y0 + h01 * y1 + H * (h10 * d0 + h11 * d1)
                + H * H * (h20 * s0 + h21 * s1))
    if deriv == 1:
        t2 = t * t
        t3 = t2 * t
        t4 = t3 * t
        g00 = -30 * t2 + 60 * t3 - 30 * t4
        g10 = 1 - 18 * t2 + 32 * t3 - 15 * t4
        g20 = 0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4)
        g11 = -12 * t2 + 28 * t3 - 15 * t4
        g21 = 0.5 * (3 * t2 - 8 * t3 + 5 * t4)
        return ((g00 * y0 - g00 * y1) / H + (g10 * d0 + g11 * d1)
                + H * (g20 * s0 + g21 * s1))
    raise ValueError("deriv must be 0 or 1")


@dataclass(frozen=True, eq=False)
class GraphSolution:
    """Numerical solution u of the self-expander ODE on [0, x_max].

    ``log_w_values`` holds log|u - x u'| on the grid (``-inf`` for the exact
    straight line) and ``sign`` the sign of u - x u', which equals the sign
    of h.  Between nodes u is evaluated by quintic Hermite interpolation;
    beyond x_max by the tangent ray, which is exact up to the Gaussian tail.
    """

    ivp: IvpData
    x_grid: np.ndarray
    u_values: np.ndarray
    up_values: np.ndarray
    a: float
    decay_certificate: float
    upp_values: np.ndarray
    log_w_values: np.ndarray
    sign: int

    @property
    def x_max(self) -> float:
        return float(self.x_grid[-1])

    @property
    def w_values(self) -> np.ndarray:
        """u - x u' on the grid."""
        return self.sign * np.exp(self.log_w_values)

    def _locate(self, x):
        i = np.searchsorted(self.x_grid, x, side="right") - 1
        return np.clip(i, 0, len(self.x_grid) - 2)

    def u(self, x):
        """Evaluate u at x >= 0 (scalar or array)."""
        return self._eval(x, 0)

    def up(self, x):
        """Evaluate u' at x >= 0 (scalar or array)."""
        return self._eval(x, 1)

    def _eval(self, x, deriv):
        xa = np.asarray(x, dtype=float)
        if np.any(xa < 0):
            raise ValueError("GraphSolution is defined for x >= 0 only")
        xg, uv, pv, sv = self.x_grid, self.u_values, self.up_values, self.upp_values
        i = self._locate(xa)
        inside = _hermite5(xg[i], xg[i + 1], uv[i], uv[i + 1], pv[i], pv[i + 1],
                           sv[i], sv[i + 1], np.minimum(xa, xg[-1]), deriv)
        tail = uv[-1] + pv[-1] * (xa - xg[-1]) if deriv == 0 else np.full_like(xa, pv[-1])
        out = np.where(xa <= xg[-1], inside, tail)
        return float(out) if out.ndim == 0 else out


def _line_solution(ivp: IvpData, x_max: float) -> GraphSolution:
    xs = np.linspace(0.0, x_max, 9)
    return GraphSolution(
        ivp=ivp,
        x_grid=xs,
        u_values=ivp.s * xs,
        up_values=np.full_like(xs, ivp.s),
        a=float(ivp.s),
        decay_certificate=0.0,
        upp_values=np.zeros_like(xs),
        log_w_values=np.full_like(xs, -np.inf),
        sign=0,
    )


def integrate_ivp(ivp: IvpData, x_max: float = DEFAULT_X_MAX,
                  tol: float = DEFAULT_TOL) -> GraphSolution:
    """Integrate the self-expander ODE from x = 0 to ``x_max``.

    Uses an adaptive Dormand-Prince 5(4) pair with local error per unit
    step bounded by ``tol``.  Negative heights are solved via u -> -u and
    h = 0 returns the exact straight line u = s x.

    Raises
    ------
    StepSizeUnderflow
        If the step size collapses; global existence of solutions means this
        points at a too tight ``tol`` rather than at a blow-up.
    """
    if not x_max > 0:
        raise ValueError(f"x_max must be positive, got {x_max}")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if ivp.h == 0.0:
        return _line_solution(ivp, x_max)

    sign = 1 if ivp.h > 0 else -1
    h, s = sign * ivp.h, sign * ivp.s
    xs, ps, qs, status = integrate_log_form(s, math.log(h), float(x_max), float(tol),
                                            MAX_STEP, 1.0)
    if status == STATUS_UNDERFLOW:
        raise StepSizeUnderflow(
            f"step size underflow at x={xs[-1]:.6g} for h={ivp.h}, s={ivp.s}, tol={tol}")

    g = 1.0 + ps * ps
    w = np.exp(qs)
    u = w + xs * ps
    upp = g * w
    tail = xs >= 1.0
    cert = float(np.max(np.exp(qs[tail] + 0.5 * (xs[tail] ** 2 - 1.0)))) if tail.any() else 0.0
    arrays = [xs, sign * u, sign * ps, sign * upp, qs]
    for arr in arrays:
        arr.setflags(write=False)
    return GraphSolution(
        ivp=ivp,
        x_grid=arrays[0],
        u_values=arrays[1],
        up_values=arrays[2],
        a=float(sign * ps[-1]),
        decay_certificate=cert,
        upp_values=arrays[3],
        log_w_values=arrays[4],
        sign=sign,
    )


def asymptotic_slope(sol: GraphSolution) -> float:
    """Asymptotic slope a = lim u'(x), read off at x_max.

    The remaining change of u' beyond x_max is bounded by the Gaussian decay
    of u - x u', which is negligible once x_max >= 4.
    """
    if sol.x_max < MIN_SLOPE_DOMAIN:
        raise DomainTooShort(
            f"x_max={sol.x_max} < {MIN_SLOPE_DOMAIN}: tail estimate not yet dominant")
    return float(sol.up_values[-1])


def slope_error_bound(sol: GraphSolution) -> float:
    """Bound e^{-(x_max^2 - 1)/2} (u - x u')(1) x_max on |a - lim u'|."""
    if sol.sign == 0:
        return 0.0
    x_max = sol.x_max
    i1 = int(np.searchsorted(sol.x_grid, 1.0))
    w1 = float(np.exp(sol.log_w_values[i1]))
    return math.exp(-(x_max * x_max - 1.0) / 2.0) * w1 * x_max


def scale_network_time(curve: PlaneCurve, t: float) -> PlaneCurve:
    """The curve at flow time ``t``: vertices scaled by sqrt(2 t), tangents kept."""
    if not t > 0:
        raise NonpositiveTime(f"time must be positive, got {t}")
    return curve.scaled(LAMBDA(t))
