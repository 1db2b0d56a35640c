"""Numerical checks of identities satisfied by expanding curves.

* the angle/area identity for two curves of one family crossing a third,
* graphical curve shortening flow by a semi-implicit finite difference
  scheme, used as an independent oracle for the ODE profiles,
* self-similarity of the flow started from an expander,
* the pointwise identity kappa + <X, nu> = 0 along computed curves,
* the angle chain between two candidate networks with the same asymptotes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numba import njit
from scipy.integrate import simpson
from scipy.optimize import brentq

from .core import LAMBDA
from .errors import (ConfigMismatch, DegenerateInput, NoConvergence, NoIntersection,
                     StabilityViolation, Unsupported)
from .geometry import (HalfLine, PlaneCurve, angle_between, cross2, menger_curvature,
                       polyline_intersections, rotate)
from .network import ExpandingNetwork
from .shooting import _EvenProfile, curve_through_point, expander_curve

DEFAULT_RATIO = 0.25
MAX_RATIO = 0.5
TWO_THIRDS_PI = 2.0 * math.pi / 3.0


# --------------------------------------------------------------------------
# angle / area identity

class _ParamCurve:
    """Two-ended expander X(x) = R_phi (x, u_h(x)), smooth in the graph abscissa x."""

    def __init__(self, h: float, l: HalfLine):
        self.h = float(h)
        self.l = l
        self.prof = _EvenProfile(h)
        self.phi = l.theta - self.prof.rotation_to

    def point(self, x):
        x = np.asarray(x, dtype=float)
        return rotate(np.stack([x, self.prof.u(x)], axis=-1), self.phi)

    def velocity(self, x):
        x = np.asarray(x, dtype=float)
        return rotate(np.stack([np.ones_like(x), self.prof.up(x)], axis=-1), self.phi)

    def tangent(self, x) -> np.ndarray:
        v = self.velocity(x)
        return v / np.hypot(*v)

    def abscissa(self, point) -> float:
        return float(rotate(point, -self.phi)[0])

    def abscissa_at_distance(self, dist: float) -> float:
        """x with <X(x), direction of l> = dist, for a point far out on the curve."""
        d = self.l.direction
        f = lambda x: float(np.dot(self.point(x), d)) - dist
        hi = max(1.0, dist)
        while f(hi) < 0:
            hi *= 2.0
        return brentq(f, 0.0, hi, xtol=1e-14)

    def arc_flux(self, x0: float, x1: float, n: int) -> float:
        """0.5 * integral of X x X' over [x0, x1] (signed area swept from the origin)."""
        xs = np.linspace(x0, x1, n)
        return 0.5 * float(simpson(cross2(self.point(xs), self.velocity(xs)), x=xs))

    def gaussian_tail(self, x: float) -> float:
        """Bound on the area between the graph and its asymptote beyond x."""
        sol = self.prof.sol
        if sol.sign == 0:
            return 0.0
        i1 = int(np.searchsorted(sol.x_grid, 1.0))
        w1 = float(np.exp(sol.log_w_values[i1]))
        return (1.0 + sol.a ** 2) * w1 * math.exp(-(x * x - 1.0) / 2.0) / x ** 3


def _intersect(c: _ParamCurve, b: _ParamCurve) -> tuple[float, float]:
    """Graph abscissae (x_c, x_b) of the intersection point, Newton-refined."""
    pc = expander_curve(c.h, c.l, spacing=0.01)
    pb = expander_curve(b.h, b.l, spacing=0.01)
    pts = polyline_intersections(pc.vertices, pb.vertices)
    if len(pts) == 0:
        raise NoIntersection(f"curves with h={c.h} and h={b.h} do not intersect")
    p = pts[0]
    xc, xb = c.abscissa(p), b.abscissa(p)
    for _ in range(50):
        F = c.point(xc) - b.point(xb)
        J = np.column_stack([c.velocity(xc), -b.velocity(xb)])
        d = np.linalg.solve(J, -F)
        xc += d[0]
        xb += d[1]
        if max(abs(d[0]), abs(d[1])) <= 1e-15 * max(1.0, abs(xc), abs(xb)):
            break
    if float(np.hypot(*(c.point(xc) - b.point(xb)))) > 1e-12:
        raise NoConvergence("intersection refinement did not converge")
    return xc, xb


@dataclass(frozen=True)
class AngleAreaReport:
    """Both sides of alpha2 - alpha1 = +-2|A|.

    ``orientation`` is +1 when p1 comes before p2 along b (oriented towards
    its asymptote), -1 otherwise; the identity then reads lhs = orientation * rhs.
    ``tail_bound`` bounds the area cut off by closing the region far out.
    """

    alpha1: float
    alpha2: float
    area: float
    lhs: float
    rhs: float
    rel_error: float
    orientation: int = 1
    tail_bound: float = 0.0
    quadrature_change: float = 0.0
    p1: tuple[float, float] = (0.0, 0.0)
    p2: tuple[float, float] = (0.0, 0.0)


def angle_area_check(l: HalfLine, h1: float, h2: float, b_rotation: float, b_height: float,
                     samples: int = 4001, far: float = 8.0) -> AngleAreaReport:
    """Compare the angle difference at two crossings with twice the enclosed area.

    c_{h1}, c_{h2} are asymptotic to ``l``; b is c_{b_height} rotated by
    ``b_rotation``.  The region between the crossing points is closed by a
    chord across the two c-curves at distance ~``far`` along ``l``; the area
    integral sum 0.5 * X x X' uses Simpson's rule with ``samples`` nodes per arc
    and is repeated with half as many to report the quadrature change.

    Raises
    ------
    NoIntersection
        If b misses c_{h1} or c_{h2}.
    """
    if math.fmod(b_rotation, 2.0 * math.pi) == 0.0:
        raise ValueError("b must be a proper rotation of the family")
    b = _ParamCurve(b_height, HalfLine(l.theta + b_rotation))
    c1, c2 = _ParamCurve(h1, l), _ParamCurve(h2, l)
    xc1, xb1 = _intersect(c1, b)
    if h1 == h2:
        p = c1.point(xc1)
        a = angle_between(b.tangent(xb1), c1.tangent(xc1))
        return AngleAreaReport(a, a, 0.0, 0.0, 0.0, 0.0, 1, 0.0, 0.0,
                               (float(p[0]), float(p[1])), (float(p[0]), float(p[1])))
    xc2, xb2 = _intersect(c2, b)
    alpha1 = angle_between(b.tangent(xb1), c1.tangent(xc1))
    alpha2 = angle_between(b.tangent(xb2), c2.tangent(xc2))

    d = l.direction
    dist = max(float(np.dot(c.point(max(far, xc)), d)) for c, xc in ((c1, xc1), (c2, xc2)))
    X1, X2 = c1.abscissa_at_distance(dist), c2.abscissa_at_distance(dist)

    def loop_area(n):
        return (b.arc_flux(xb1, xb2, n) + c2.arc_flux(xc2, X2, n)
                + 0.5 * float(cross2(c2.point(X2), c1.point(X1)))
                + c1.arc_flux(X1, xc1, n))

    n = samples | 1
    area = abs(loop_area(n))
    change = abs(area - abs(loop_area((n // 2) | 1)))
    orientation = 1 if xb1 < xb2 else -1
    lhs = alpha2 - alpha1
    rhs = 2.0 * area
    rel = abs(lhs - orientation * rhs) / rhs if rhs > 0 else abs(lhs)
    tail = 2.0 * (c1.gaussian_tail(X1) + c2.gaussian_tail(X2))
    p1, p2 = c1.point(xc1), c2.point(xc2)
    return AngleAreaReport(alpha1, alpha2, area, lhs, rhs, rel, orientation, tail, change,
                           (float(p1[0]), float(p1[1])), (float(p2[0]), float(p2[1])))


# --------------------------------------------------------------------------
# graphical curve shortening flow

@dataclass(frozen=True, eq=False)
class PdeProfile:
    """Graph u sampled on a uniform grid at time t."""

    x_grid: np.ndarray
    u: np.ndarray
    t: float

    @property
    def dx(self) -> float:
        return float(self.x_grid[1] - self.x_grid[0])


@njit(cache=True, nogil=True)
def _csf_steps(u, dx, dt, left, right):
    """Semi-implicit steps (I - dt * diag(1/(1+u_x^2)) D2) u^{n+1} = u^n.

    Dirichlet rows at both ends; the tridiagonal system is assembled inside
    the forward sweep of the Thomas algorithm.
    """
    n = u.shape[0]
    r = dt / (dx * dx)
    inv2dx = 1.0 / (2.0 * dx)
    cp = np.empty(n)
    dp = np.empty(n)
    for k in range(left.shape[0]):
        cp[0] = 0.0
        dp[0] = left[k]
        for i in range(1, n - 1):
            ux = (u[i + 1] - u[i - 1]) * inv2dx
            c = r / (1.0 + ux * ux)
            m = 1.0 + 2.0 * c + c * cp[i - 1]
            cp[i] = -c / m
            dp[i] = (u[i] + c * dp[i - 1]) / m
        u[n - 1] = right[k]
        for i in range(n - 2, 0, -1):
            u[i] = dp[i] - cp[i] * u[i + 1]
        u[0] = left[k]
    return u


def evolve_graph_csf(profile: PdeProfile, t_end: float,
                     boundary: Callable[[np.ndarray], tuple],
                     ratio: float = DEFAULT_RATIO, max_ratio: float = MAX_RATIO) -> PdeProfile:
    """Evolve u_t = u_xx / (1 + u_x^2) from ``profile.t`` to ``t_end``.

    Central differences in space, the diffusion coefficient frozen at the
    old time level, Dirichlet values ``boundary(t) -> (u(x_0), u(x_N))``.
    ``boundary`` is called once with the array of all step times and may
    return arrays or scalars.
    The step is dt = ratio * dx^2, shrunk slightly so that t_end is hit
    exactly.

    Raises
    ------
    StabilityViolation
        If ``ratio`` exceeds ``max_ratio``.
    """
    t_start = float(profile.t)
    if not t_end > t_start or t_start < 0:
        raise ValueError(f"need t_end > t_start >= 0, got {t_start}, {t_end}")
    if not 0 < ratio <= max_ratio:
        raise StabilityViolation(f"step ratio dt/dx^2 = {ratio} outside (0, {max_ratio}]")
    x = np.asarray(profile.x_grid, dtype=float)
    dx = profile.dx
    if not np.allclose(np.diff(x), dx, rtol=1e-9, atol=0.0):
        raise ValueError("x_grid must be uniform")
    nsteps = int(math.ceil((t_end - t_start) / (ratio * dx * dx)))
    dt = (t_end - t_start) / nsteps
    times = t_start + dt * np.arange(1, nsteps + 1)
    left, right = boundary(times)
    left = np.ascontiguousarray(np.broadcast_to(np.asarray(left, dtype=float), times.shape))
    right = np.ascontiguousarray(np.broadcast_to(np.asarray(right, dtype=float), times.shape))
    u = _csf_steps(np.array(profile.u, dtype=float), dx, dt, left, right)
    return PdeProfile(x, u, float(t_end))


def uniform_grid(L: float, dx: float) -> np.ndarray:
    n = int(round(2.0 * L / dx))
    if n < 2 or abs(n * dx - 2.0 * L) > 1e-9 * L:
        raise ValueError(f"dx={dx} does not divide [-{L}, {L}]")
    return np.linspace(-L, L, n + 1)


def scaled_profile(h: float, t: float) -> Callable[[np.ndarray], np.ndarray]:
    """x -> lambda(t) u_h(x / lambda(t)), the expander graph at time t (t >= 0)."""
    prof = _EvenProfile(h)
    lam = LAMBDA(t)
    if lam == 0.0:
        a = prof.a
        return lambda x: a * np.abs(np.asarray(x, dtype=float))
    return lambda x: lam * prof.u(np.asarray(x, dtype=float) / lam)


def expander_boundary(h: float, L: float) -> Callable[[np.ndarray], tuple]:
    """Dirichlet data of the expanding graph at x = -L and x = L (even, so equal)."""
    prof = _EvenProfile(h)

    def bc(times):
        lam = np.sqrt(2.0 * np.asarray(times, dtype=float))
        with np.errstate(divide="ignore"):
            v = np.where(lam > 0, lam * prof.u(L / np.maximum(lam, 1e-300)), prof.a * L)
        return v, v
    return bc


def corner_evolution_error(a: float, dx: float = 1.0 / 256.0, L: float = 8.0,
                           window: float = 4.0, t_end: float = 0.5,
                           ratio: float = DEFAULT_RATIO) -> float:
    """Sup distance on [-window, window] between the flow of a|x| and the expander.

    The flow of the cone a|x| is self-similar; at time t it equals
    lambda(t) u_h(x / lambda(t)) with h chosen so that the expander has
    asymptotic slope a.
    """
    from .shooting import height_for_slope
    h = height_for_slope(a, tol=1e-12)
    x = uniform_grid(L, dx)
    out = evolve_graph_csf(PdeProfile(x, a * np.abs(x), 0.0), t_end,
                           expander_boundary(h, L), ratio=ratio)
    mask = np.abs(x) <= window + 1e-12
    return float(np.max(np.abs(out.u[mask] - scaled_profile(h, t_end)(x[mask]))))


def self_similarity_residual(h: float, t1: float, t2: float, dx: float = 1.0 / 64.0,
                             L: float = 8.0, window: float = 4.0,
                             ratio: float = DEFAULT_RATIO) -> float:
    """Sup distance between the flow of the expander graph and its rescaling.

    Starts from the two-ended profile lambda(t1) u_h(x / lambda(t1)), evolves
    to t2 with exact boundary data and compares on [-window, window] with the
    initial graph scaled by lambda(t2) / lambda(t1).
    """
    if not 0 < t1 <= t2:
        raise ValueError(f"need 0 < t1 <= t2, got {t1}, {t2}")
    if t1 == t2 or h == 0.0:
        return 0.0
    x = uniform_grid(L, dx)
    u1 = scaled_profile(h, t1)(x)
    out = evolve_graph_csf(PdeProfile(x, u1, t1), t2, expander_boundary(h, L), ratio=ratio)
    mask = np.abs(x) <= window + 1e-12
    return float(np.max(np.abs(out.u[mask] - scaled_profile(h, t2)(x[mask]))))


# --------------------------------------------------------------------------
# pointwise expander identity

def expander_identity_residual(curve: PlaneCurve, t: float = 0.5) -> float:
    """max |kappa + <X, nu> / (2 t)| over interior vertices.

    kappa is the signed Menger curvature (left turns positive) and nu the
    right-hand unit normal, so a curve moving outward by homothety satisfies
    the identity with zero residual.
    """
    v = curve.vertices
    if len(v) < 3:
        return 0.0
    kappa = menger_curvature(v)
    nu = curve.normals()[1:-1]
    support = np.einsum("ij,ij->i", v[1:-1], nu)
    return float(np.max(np.abs(kappa + support / (2.0 * t))))


# --------------------------------------------------------------------------
# angle chain between two candidate networks

@dataclass(frozen=True)
class AngleChainReport:
    """Angles at the crossing r of b_j (network B) with c_i (network C).

    eta: between c_i and the auxiliary curve through r asymptotic to l_k;
    gamma: between c_i and b_j; b_aux: between b_j and the auxiliary curve;
    zeta: measured angle between b_j and b_k at B's junction.  For two
    balanced networks zeta < b_aux <= eta + gamma < 2 pi / 3 would have to
    hold, contradicting zeta = 2 pi / 3.  ``mismatch`` = 2 pi / 3 - zeta.
    """

    eta: float
    gamma: float
    zeta: float
    b_aux: float
    r: tuple[float, float]
    indices: tuple[int, int, int]
    b_network: int
    monotone: bool
    triangle: bool
    eta_below: bool
    gamma_below: bool
    mismatch: float


def _first_crossing(a: PlaneCurve, b: PlaneCurve):
    pts = polyline_intersections(a.vertices, b.vertices)
    if len(pts) == 0:
        return None
    # the crossing closest to the junction of a
    k = int(np.argmin(np.hypot(*(pts - a.start).T)))
    return pts[k]


def _tangent_near(curve: PlaneCurve, point) -> np.ndarray:
    d = np.hypot(*(curve.vertices - point).T)
    i = int(np.argmin(d))
    return curve.tangents[i]


def angle_chain_diagnostic(net1: ExpandingNetwork, net2: ExpandingNetwork,
                           tol: float = 1e-12) -> AngleChainReport:
    """Measure the angles that would contradict two distinct balanced networks.

    The network with the larger balance residual plays B (the suspect); the
    first pair (c_i, b_j), i != j, that crosses defines r, and the auxiliary
    curve through r is asymptotic to the remaining half-line l_k.

    Raises
    ------
    ConfigMismatch
        If the networks have different asymptotic half-lines.
    DegenerateInput
        If the triple points coincide.
    NoIntersection
        If no curve of one network crosses a curve of the other.
    Unsupported
        If the crossing sits at a junction, so the pictured layout does not apply.
    """
    th1, th2 = net1.config.thetas, net2.config.thetas
    if not np.allclose(th1, th2, rtol=0.0, atol=1e-12):
        raise ConfigMismatch("networks are asymptotic to different half-lines")
    if float(np.hypot(*(net1.P - net2.P))) <= tol:
        raise DegenerateInput("triple points coincide; the angle chain needs two networks")
    if net2.balance_residual >= net1.balance_residual:
        B, C, b_id = net2, net1, 2
    else:
        B, C, b_id = net1, net2, 1
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            r = _first_crossing(B.curves[j], C.curves[i])
            if r is None:
                continue
            if min(np.hypot(*(r - B.P)), np.hypot(*(r - C.P))) <= 1e-9:
                raise Unsupported("crossing at a junction; layout not covered")
            k = 3 - i - j
            aux = curve_through_point(r, B.config.lines[k]).tangent_at_P
            Tc = _tangent_near(C.curves[i], r)
            Tb = _tangent_near(B.curves[j], r)
            eta = angle_between(-Tc, aux)
            gamma = angle_between(-Tc, Tb)
            b_aux = angle_between(Tb, aux)
            zeta = angle_between(B.tangents[j], B.tangents[k])
            return AngleChainReport(
                eta=eta, gamma=gamma, zeta=zeta, b_aux=b_aux,
                r=(float(r[0]), float(r[1])), indices=(i, j, k), b_network=b_id,
                monotone=zeta < b_aux, triangle=b_aux <= eta + gamma + 1e-12,
                eta_below=eta < math.pi / 3, gamma_below=gamma < math.pi / 3,
                mismatch=TWO_THIRDS_PI - zeta)
    raise NoIntersection("no curve of one network crosses a curve of the other")
