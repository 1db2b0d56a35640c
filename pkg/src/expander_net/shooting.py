"""Expanding curves asymptotic to a prescribed half-line.

The family used throughout is the even solution u_h of the self-expander
ODE with u_h(0) = h, u_h'(0) = 0, extended to x < 0 by reflection and
rotated rigidly so that its right end becomes asymptotic to a given
half-line.  |h| is the distance of the curve from the origin.  For a fixed
half-line these rotated curves foliate the plane, which makes the curve
through a given point computable by a bracketed 1-D search over h.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .core import DEFAULT_X_MAX, GraphSolution, IvpData, integrate_ivp, ode_rhs
from .errors import BracketFailure, NoConvergence, ToleranceNotMet
from .geometry import HalfLine, PlaneCurve, rotate

__all__ = [
    "HalfLine",
    "PlaneCurve",
    "ShootResult",
    "slope_for_height",
    "height_for_slope",
    "expander_curve",
    "curve_through_point",
]

# integration tolerance used inside the shooting loops; tighter than the
# library default so that the rotation angle is accurate to ~1e-11
SHOOT_IVP_TOL = 1e-12
DEFAULT_SHOOT_TOL = 1e-9
DEFAULT_SPACING = 2e-3
H_BOUND = 1e4
MIN_TAIL_X = 4.0


@lru_cache(maxsize=8192)
def _profile(h_abs: float, x_max: float = DEFAULT_X_MAX,
             tol: float = SHOOT_IVP_TOL) -> GraphSolution:
    return integrate_ivp(IvpData(h_abs, 0.0), x_max, tol)


class _EvenProfile:
    """u_h on all of R via reflection; h < 0 by u -> -u."""

    __slots__ = ("h", "sigma", "sol", "a")

    def __init__(self, h: float, x_max: float = DEFAULT_X_MAX, tol: float = SHOOT_IVP_TOL):
        self.h = float(h)
        self.sigma = 1.0 if h >= 0 else -1.0
        self.sol = _profile(abs(self.h), x_max, tol)
        self.a = self.sigma * self.sol.a

    def u(self, x):
        return self.sigma * self.sol.u(np.abs(x))

    def up(self, x):
        return self.sigma * self.sol.up(np.abs(x)) * np.sign(x)

    @property
    def rotation_to(self):
        return math.atan(self.a)


def slope_for_height(h: float, x_max: float = DEFAULT_X_MAX, tol: float = SHOOT_IVP_TOL) -> float:
    """Asymptotic slope a(h) of the solution with u(0) = h, u'(0) = 0.

    Odd and strictly increasing in h, with a(h) -> +-inf as h -> +-inf.
    """
    if not math.isfinite(h):
        raise ValueError(f"h must be finite, got {h!r}")
    if h == 0.0:
        return 0.0
    a = _profile(abs(float(h)), x_max, tol).a
    return a if h > 0 else -a


def height_for_slope(a: float, tol: float = 1e-10, h_bound: float = H_BOUND,
                     x_max: float = DEFAULT_X_MAX) -> float:
    """Height h with |slope_for_height(h) - a| <= tol, by bisection.

    The bracket [0, h] is grown by doubling; a(h) is a strictly increasing
    bijection, so a sign change must appear.
    """
    if not math.isfinite(a):
        raise ValueError(f"a must be finite, got {a!r}")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if a == 0.0:
        return 0.0
    sign = 1.0 if a > 0 else -1.0
    target = abs(a)
    lo, hi = 0.0, 1.0
    while slope_for_height(hi, x_max) < target:
        lo, hi = hi, 2.0 * hi
        if hi > h_bound:
            raise BracketFailure(f"no height below {h_bound} reaches slope {a}")
    # stop once the slope matches and h itself is pinned to within tol
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        am = slope_for_height(mid, x_max)
        if abs(am - target) <= tol and hi - lo <= tol:
            return sign * mid
        if am < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 2.0 * math.ulp(hi):
            break
    raise NoConvergence(f"bisection for slope {a} stalled at h={0.5 * (lo + hi)}")


def _arclength_samples(prof: _EvenProfile, x0: float, x1: float, spacing: float) -> np.ndarray:
    """Graph abscissae on [x0, x1] with (nearly) uniform arclength.

    The spacing is ``spacing`` divided by max(1, kappa_max)^1.5, so that
    three-point curvature estimates keep the same accuracy on strongly
    bent curves.
    """
    n_fine = max(64, int(math.ceil((x1 - x0) / (spacing / 8.0))) + 1)
    xf = np.linspace(x0, x1, n_fine)
    p = prof.up(xf)
    g = 1.0 + p * p
    kappa_max = float(np.max(np.abs(ode_rhs(xf, prof.u(xf), p)) / g ** 1.5))
    spacing = spacing / max(1.0, kappa_max) ** 1.5
    speed = np.sqrt(g)
    s = np.concatenate([[0.0], np.cumsum(0.5 * (speed[1:] + speed[:-1]) * np.diff(xf))])
    n = max(2, int(math.ceil(s[-1] / spacing)) + 1)
    return np.interp(np.linspace(0.0, s[-1], n), s, xf)


def _graph_curve(prof: _EvenProfile, phi: float, xs: np.ndarray, l: HalfLine) -> PlaneCurve:
    pts = np.column_stack([xs, prof.u(xs)])
    p = prof.up(xs)
    nrm = np.sqrt(1.0 + p * p)
    tang = np.column_stack([1.0 / nrm, p / nrm])
    return PlaneCurve(rotate(pts, phi), rotate(tang, phi), l, prof.h, phi)


def expander_curve(h: float, l: HalfLine, spacing: float = DEFAULT_SPACING,
                   x_max: float = DEFAULT_X_MAX, extent: float | None = None) -> PlaneCurve:
    """Two-ended expanding curve with parameter ``h`` whose right end is asymptotic to ``l``.

    The graph of u_h over [-extent, extent] (default ``x_max``) is rotated
    so that the line of slope a(h) maps onto ``l``.  Vertices are spaced
    approximately ``spacing`` apart in arclength and ordered from the left
    end towards the end asymptotic to ``l``.
    """
    if not math.isfinite(h):
        raise ValueError(f"h must be finite, got {h!r}")
    prof = _EvenProfile(h, x_max)
    phi = l.theta - prof.rotation_to
    X = x_max if extent is None else float(extent)
    right = _arclength_samples(prof, 0.0, X, spacing)
    xs = np.concatenate([-right[:0:-1], right])
    return _graph_curve(prof, phi, xs, l)


@dataclass(frozen=True, eq=False)
class ShootResult:
    """Curve through a point P, asymptotic to a half-line, and its tangent at P."""

    curve: PlaneCurve | None
    tangent_at_P: np.ndarray
    h: float
    iterations: int
    residual: float
    x_at_P: float = 0.0
    rotation: float = 0.0


class _SideFunction:
    """F(h) = (signed vertical offset of P above the rotated curve c_h).

    In the frame of c_h, P has coordinates Q = R(-phi(h)) P and
    F(h) = Q_y - u_h(Q_x).  F decreases strictly through its unique zero.
    """

    def __init__(self, P, l: HalfLine, x_max: float):
        self.P = np.asarray(P, dtype=float)
        self.theta = l.theta
        self.x_max = x_max
        self.calls = 0

    def frame(self, h: float):
        prof = _EvenProfile(h, self.x_max)
        phi = self.theta - prof.rotation_to
        c, s = math.cos(phi), math.sin(phi)
        qx = c * self.P[0] + s * self.P[1]
        qy = -s * self.P[0] + c * self.P[1]
        return prof, phi, qx, qy

    def __call__(self, h: float) -> float:
        self.calls += 1
        prof, _, qx, qy = self.frame(h)
        return qy - prof.u(qx)


def _bracket(F: _SideFunction, seed: float, step: float, h_bound: float):
    f0 = F(seed)
    if f0 == 0.0:
        return seed, seed, f0, f0
    direction = 1.0 if f0 > 0 else -1.0
    lo, flo = seed, f0
    while True:
        hi = lo + direction * step
        if abs(hi) > h_bound:
            if lo == direction * h_bound:
                raise BracketFailure(
                    f"no sign change of the side function within |h| <= {h_bound}")
            hi = direction * h_bound
        fhi = F(hi)
        if fhi == 0.0 or (fhi > 0) != (f0 > 0):
            return lo, hi, flo, fhi
        lo, flo = hi, fhi
        step *= 2.0


def _shoot(P, l: HalfLine, tol: float = DEFAULT_SHOOT_TOL, seed: float | None = None,
           x_max: float = DEFAULT_X_MAX, h_bound: float = H_BOUND) -> ShootResult:
    """curve_through_point without building the polyline."""
    P = np.asarray(P, dtype=float)
    if not np.all(np.isfinite(P)):
        raise ValueError(f"P must be finite, got {P}")
    if l.contains(P):
        return ShootResult(None, l.direction, 0.0, 0, 0.0,
                           x_at_P=float(np.hypot(*P)), rotation=l.theta)

    F = _SideFunction(P, l, x_max)
    # c_h stays at distance |h| from the origin, so the root has |h| <= |P|
    h_bound = min(h_bound, float(np.hypot(*P)) * (1.0 + 1e-9))
    if seed is None:
        lo, hi, flo, fhi = _bracket(F, 0.0, 1.0, h_bound)
    else:
        seed = min(max(float(seed), -h_bound), h_bound)
        lo, hi, flo, fhi = _bracket(F, seed, 1e-3 * (1.0 + abs(seed)), h_bound)
    if flo == 0.0:
        h = lo
    elif fhi == 0.0:
        h = hi
    else:
        try:
            h = brentq(F, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
        except RuntimeError as exc:
            raise NoConvergence(str(exc)) from exc
    prof, phi, qx, qy = F.frame(h)
    offset = qy - prof.u(qx)
    residual = abs(offset) / max(1.0, float(np.hypot(*P)))
    if residual > tol:
        raise ToleranceNotMet(f"residual {residual:.3e} exceeds tol {tol:.3e} at P={P}")
    p = prof.up(qx)
    nrm = math.sqrt(1.0 + p * p)
    tangent = rotate(np.array([1.0 / nrm, p / nrm]), phi)
    return ShootResult(None, tangent, float(h), F.calls, residual, x_at_P=float(qx), rotation=phi)


def curve_from_point(shot: ShootResult, l: HalfLine, spacing: float = DEFAULT_SPACING,
                     x_max: float = DEFAULT_X_MAX, reach: float = 12.0) -> PlaneCurve:
    """Polyline of the shot curve from P towards infinity along ``l``.

    The graph is sampled until the curve leaves the disc of radius ``reach``
    and the graph abscissa is at least 4, where the curve is within the
    Gaussian tail of its asymptote; beyond x_max the tail is the tangent ray.
    """
    prof = _EvenProfile(shot.h, x_max)
    x0 = shot.x_at_P
    x_end = max(MIN_TAIL_X, x0 + 1.0, reach / math.sqrt(1.0 + prof.a ** 2) + 1.0)
    xs = _arclength_samples(prof, x0, x_end, spacing)
    return _graph_curve(prof, shot.rotation, xs, l)


def curve_through_point(P, l: HalfLine, tol: float = DEFAULT_SHOOT_TOL,
                        seed: float | None = None, spacing: float = DEFAULT_SPACING,
                        x_max: float = DEFAULT_X_MAX, reach: float = 12.0) -> ShootResult:
    """The expanding curve that starts at ``P`` and is asymptotic to ``l``.

    Searches the family parameter h (bracket grown from ``seed``, default 0,
    then Brent's method on the side function).  ``tangent_at_P`` points
    towards the end asymptotic to ``l``; ``residual`` is the offset of P from
    the curve relative to max(1, |P|).  If P lies on ``l`` the curve is the
    half-line from P and the tangent is the direction of ``l``.

    Raises
    ------
    BracketFailure, NoConvergence
        If the search over h fails (impossible for exact arithmetic).
    ToleranceNotMet
        If the final residual exceeds ``tol``.
    """
    shot = _shoot(P, l, tol, seed, x_max)
    curve = curve_from_point(shot, l, spacing, x_max, reach)
    return ShootResult(curve, shot.tangent_at_P, shot.h, shot.iterations, shot.residual,
                       shot.x_at_P, shot.rotation)

