"""Balanced triple-junction networks expanding from three half-lines.

For a candidate start point P each half-line l_i determines exactly one
expanding curve through P; V(P) = T_1 + T_2 + T_3 is the sum of their unit
tangents at P.  V points inwards on large circles, so it has a zero, and
that zero is the triple point of the (unique) balanced network.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .core import LAMBDA
from .errors import CertificateFailure, InvalidConfig, NoConvergence, NonpositiveTime, \
    NoUniqueSmallestSegment
from .geometry import TWO_PI, HalfLine, PlaneCurve, normalize_angle
from .shooting import DEFAULT_SPACING, ShootResult, _shoot, curve_from_point

log = logging.getLogger(__name__)

DEFAULT_SOLVE_TOL = 1e-10
CERT_RADIUS = 16.0
CERT_SAMPLES = 64
CERT_DOUBLINGS = 6
FD_STEP = 1e-6
ANGLE_TIE_TOL = 1e-12
DISTINCT_TOL = 1e-12


@dataclass(frozen=True)
class NetworkConfig:
    """Three pairwise distinct half-lines from the origin."""

    lines: tuple[HalfLine, HalfLine, HalfLine]

    def __post_init__(self):
        lines = tuple(ln if isinstance(ln, HalfLine) else HalfLine(float(ln))
                      for ln in self.lines)
        if len(lines) != 3:
            raise InvalidConfig(f"need exactly three half-lines, got {len(lines)}")
        for i in range(3):
            for j in range(i + 1, 3):
                if _angular_distance(lines[i].theta, lines[j].theta) <= DISTINCT_TOL:
                    raise InvalidConfig("half-lines must be pairwise distinct")
        object.__setattr__(self, "lines", lines)

    @classmethod
    def from_angles(cls, angles, degrees: bool = False) -> "NetworkConfig":
        vals = [math.radians(a) if degrees else float(a) for a in angles]
        if len(vals) != 3:
            raise InvalidConfig(f"need exactly three angles, got {len(vals)}")
        return cls(tuple(HalfLine(v) for v in vals))

    @property
    def thetas(self) -> np.ndarray:
        return np.array([ln.theta for ln in self.lines])

    def rotated(self, phi: float) -> "NetworkConfig":
        return NetworkConfig(tuple(HalfLine(ln.theta + phi) for ln in self.lines))

    def reflected(self, axis_angle: float = 0.0) -> "NetworkConfig":
        """Mirror image across the line through the origin at ``axis_angle``."""
        return NetworkConfig(tuple(HalfLine(2.0 * axis_angle - ln.theta) for ln in self.lines))


def _angular_distance(a: float, b: float) -> float:
    d = abs(normalize_angle(a) - normalize_angle(b))
    return min(d, TWO_PI - d)


@dataclass(frozen=True, eq=False)
class ExpandingNetwork:
    """Network at the reference time t = 1/2 (or scaled to another time)."""

    P: np.ndarray
    curves: tuple[PlaneCurve, PlaneCurve, PlaneCurve]
    tangents: np.ndarray
    balance_residual: float
    config: NetworkConfig
    t: float = 0.5
    heights: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def pairwise_angles(self) -> np.ndarray:
        """Angles between T1/T2, T2/T3, T3/T1."""
        T = self.tangents
        out = []
        for i, j in ((0, 1), (1, 2), (2, 0)):
            c = float(np.clip(np.dot(T[i], T[j]), -1.0, 1.0))
            s = abs(T[i][0] * T[j][1] - T[i][1] * T[j][0])
            out.append(math.atan2(s, c))
        return np.array(out)


@dataclass(frozen=True)
class SolveReport:
    P: np.ndarray
    residual: float
    iterations: int
    certificate_radius: float
    certificate_min_inward: float
    field_evaluations: int = 0
    jacobian_cond: float = float("nan")
    fallback_steps: int = 0
    notes: tuple[str, ...] = field(default_factory=tuple)


class _Field:
    """V(P) with warm-started shots and an evaluation counter."""

    def __init__(self, config: NetworkConfig, shoot_tol: float):
        self.config = config
        self.shoot_tol = shoot_tol
        self.evaluations = 0
        self._last_heights = None

    def shots(self, P, seeds=None) -> list[ShootResult]:
        self.evaluations += 1
        seeds = seeds if seeds is not None else self._last_heights
        out = []
        for i, ln in enumerate(self.config.lines):
            seed = None if seeds is None else seeds[i]
            out.append(_shoot(P, ln, self.shoot_tol, seed))
        return out

    def __call__(self, P, remember: bool = False) -> np.ndarray:
        shots = self.shots(P)
        if remember:
            self._last_heights = [s.h for s in shots]
        return np.sum([s.tangent_at_P for s in shots], axis=0)


def tangent_field(config: NetworkConfig, P, tol: float = 1e-9) -> np.ndarray:
    """V(P): sum of the unit start tangents of the three curves through P."""
    return _Field(config, tol)(np.asarray(P, dtype=float))


def inward_margin(config: NetworkConfig, radius: float, samples: int = CERT_SAMPLES,
                  tol: float = 1e-9) -> np.ndarray:
    """-<P, V(P)>/|P| at ``samples`` equally spaced points of the circle."""
    V = _Field(config, tol)
    out = np.empty(samples)
    for k in range(samples):
        ang = TWO_PI * k / samples
        P = radius * np.array([math.cos(ang), math.sin(ang)])
        out[k] = -float(np.dot(P, V(P))) / radius
    return out


def certify(config: NetworkConfig, radius: float = CERT_RADIUS,
            doublings: int = CERT_DOUBLINGS, samples: int = CERT_SAMPLES) -> tuple[float, float]:
    """Smallest radius 16 * 2^k on which V points strictly inwards at all samples.

    Returns (radius, min inward component).  Raises CertificateFailure if no
    radius up to 16 * 2^doublings works.
    """
    r = radius
    for _ in range(doublings + 1):
        m = float(np.min(inward_margin(config, r, samples)))
        if m > 0.0:
            return r, m
        r *= 2.0
    raise CertificateFailure(
        f"field not inward-pointing on circles up to radius {r / 2.0} "
        f"(configuration nearly degenerate?)")


def _fd_jacobian(V, P, v0, step=FD_STEP):
    J = np.empty((2, 2))
    for k in range(2):
        dP = np.zeros(2)
        dP[k] = step
        J[:, k] = (V(P + dP) - v0) / step
    return J


def _grid_search(V, center, half_width, n):
    best, best_val = None, math.inf
    for gx in np.linspace(center[0] - half_width, center[0] + half_width, n):
        for gy in np.linspace(center[1] - half_width, center[1] + half_width, n):
            P = np.array([gx, gy])
            val = float(np.hypot(*V(P)))
            if val < best_val:
                best, best_val = P, val
    return best, best_val


def _wrap(d):
    return (d + math.pi) % TWO_PI - math.pi


def _start_candidates(V, radius: float, n: int, tol: float) -> list[np.ndarray]:
    """Start points for Newton from a grid over [-radius, radius]^2.

    A node that already satisfies |V| <= tol comes first, then cells around
    which the sampled field winds (nonzero index) ordered by their mean |V|,
    then the three nodes with the smallest |V|.
    """
    g = np.linspace(-radius, radius, n)
    F = np.empty((n, n, 2))
    for i, gx in enumerate(g):
        for j, gy in enumerate(g):
            F[i, j] = V(np.array([gx, gy]))
    ang = np.arctan2(F[..., 1], F[..., 0])
    mag = np.hypot(F[..., 0], F[..., 1])
    cells = []
    for i in range(n - 1):
        for j in range(n - 1):
            ring = [ang[i, j], ang[i + 1, j], ang[i + 1, j + 1], ang[i, j + 1], ang[i, j]]
            turn = sum(_wrap(b - a) for a, b in zip(ring[:-1], ring[1:]))
            if abs(turn) > math.pi:
                m = mag[i, j] + mag[i + 1, j] + mag[i + 1, j + 1] + mag[i, j + 1]
                center = np.array([0.5 * (g[i] + g[i + 1]), 0.5 * (g[j] + g[j + 1])])
                cells.append((m, i, j, center))
    cells.sort(key=lambda c: (c[0], c[1], c[2]))
    out = []
    k0 = int(np.argmin(mag))
    if mag.flat[k0] <= tol:
        i, j = np.unravel_index(k0, mag.shape)
        out.append(np.array([g[i], g[j]]))
    out.extend(c[3] for c in cells)
    for k in np.argsort(mag, axis=None, kind="stable")[:3]:
        i, j = np.unravel_index(k, mag.shape)
        out.append(np.array([g[i], g[j]]))
    return out


def _newton(V, P, tol, max_iter):
    """Damped Newton with FD Jacobian; local grid search when a step fails."""
    P = np.asarray(P, dtype=float).copy()
    v = V(P, remember=True)
    res = float(np.hypot(*v))
    iterations = 0
    fallback = 0
    J = None
    while res > tol:
        if iterations >= max_iter:
            raise NoConvergence(f"|V|={res:.3e} > tol={tol:.3e} after {max_iter} iterations")
        iterations += 1
        J = _fd_jacobian(V, P, v)
        try:
            d = np.linalg.solve(J, -v)
        except np.linalg.LinAlgError:
            d = None
        improved = False
        if d is not None and np.all(np.isfinite(d)):
            lam = 1.0
            for _ in range(30):
                trial = P + lam * d
                vt = V(trial)
                rt = float(np.hypot(*vt))
                if rt < res:
                    P, v, res = trial, vt, rt
                    improved = True
                    break
                lam *= 0.5
        if not improved:
            fallback += 1
            width = max(1e-8, min(1.0, 10.0 * res))
            Pg, rg = _grid_search(V, P, width, 5)
            if rg >= res:
                raise NoConvergence(f"no descent from |V|={res:.3e} at P={P}")
            P, res = Pg, rg
            v = V(P)
        V(P, remember=True)
    return P, res, iterations, fallback, J


def solve_triple_point(config: NetworkConfig, tol: float = DEFAULT_SOLVE_TOL, seed=None,
                       certify_field: bool = True, grid_n: int = 17, max_iter: int = 60,
                       spacing: float = DEFAULT_SPACING, reach: float = 12.0
                       ) -> tuple[ExpandingNetwork, SolveReport]:
    """Find P with |V(P)| <= tol and assemble the balanced network.

    Without ``seed``, V is sampled on a grid over the certified square and
    Newton starts from the grid cells around which V winds (then from the
    nodes of smallest |V|).  Newton is damped by step halving and falls back
    to a shrinking local grid search when no halving reduces |V|.

    Raises
    ------
    CertificateFailure
        If the inward-pointing check fails on every tried radius.
    NoConvergence
        If no start point reaches |V| <= tol within ``max_iter`` iterations.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    notes = []
    if certify_field:
        radius, margin = certify(config)
    else:
        radius, margin = CERT_RADIUS, float("nan")

    V = _Field(config, shoot_tol=min(1e-9, tol))
    starts = [np.asarray(seed, dtype=float)] if seed is not None else \
        _start_candidates(V, radius, grid_n, tol)
    failures = []
    for k, P0 in enumerate(starts):
        V._last_heights = None
        try:
            P, res, iterations, fallback, J = _newton(V, P0, tol, max_iter)
            break
        except NoConvergence as exc:
            failures.append(f"start {P0}: {exc}")
    else:
        raise NoConvergence("; ".join(failures) or "no start points")
    notes.extend(failures)

    shots = V.shots(P)
    tangents = np.array([s.tangent_at_P for s in shots])
    res = float(np.hypot(*tangents.sum(axis=0)))
    if J is None:
        J = _fd_jacobian(V, P, tangents.sum(axis=0))
    cond = float(np.linalg.cond(J))
    curves = tuple(curve_from_point(s, ln, spacing=spacing, reach=reach)
                   for s, ln in zip(shots, config.lines))
    net = ExpandingNetwork(P=P.copy(), curves=curves, tangents=tangents, balance_residual=res,
                           config=config, heights=tuple(s.h for s in shots))
    report = SolveReport(P=P.copy(), residual=res, iterations=iterations,
                         certificate_radius=radius, certificate_min_inward=margin,
                         field_evaluations=V.evaluations, jacobian_cond=cond,
                         fallback_steps=fallback, notes=tuple(notes))
    log.debug("solved %s: P=%s |V|=%.3e iters=%d evals=%d", config.thetas, P, res,
              iterations, V.evaluations)
    return net, report


def network_at_time(net: ExpandingNetwork, t: float) -> ExpandingNetwork:
    """Rescale a network given at time ``net.t`` to time ``t``."""
    if not t > 0:
        raise NonpositiveTime(f"time must be positive, got {t}")
    factor = LAMBDA(t) / LAMBDA(net.t)
    return ExpandingNetwork(P=net.P * factor,
                            curves=tuple(c.scaled(factor) for c in net.curves),
                            tangents=net.tangents, balance_residual=net.balance_residual,
                            config=net.config, t=t, heights=net.heights)


def sector_angles(config: NetworkConfig) -> np.ndarray:
    """beta_i: opening angle of the sector between l_i and its clockwise neighbour."""
    th = config.thetas
    out = np.empty(3)
    for i in range(3):
        gaps = [normalize_angle(th[i] - th[j]) for j in range(3) if j != i]
        out[i] = min(gaps)
    return out


def sector_area_rates(net) -> np.ndarray:
    """Area change rates beta_i - 2 pi / 3 of the three sectors (they sum to 0)."""
    config = net.config if isinstance(net, ExpandingNetwork) else net
    return sector_angles(config) - TWO_PI / 3.0


def smallest_sector(config: NetworkConfig) -> tuple[float, float]:
    """(start angle, opening) of the unique smallest sector, counter-clockwise."""
    beta = sector_angles(config)
    order = np.argsort(beta)
    if beta[order[1]] - beta[order[0]] <= ANGLE_TIE_TOL:
        raise NoUniqueSmallestSegment("two sectors have the same opening angle")
    i = int(order[0])
    return normalize_angle(config.thetas[i] - beta[i]), float(beta[i])


def smallest_segment_check(config: NetworkConfig, P) -> bool:
    """True iff P lies strictly inside the smallest sector."""
    start, width = smallest_sector(config)
    P = np.asarray(P, dtype=float)
    if not np.any(P):
        return False
    rel = normalize_angle(math.atan2(P[1], P[0]) - start)
    return 0.0 < rel < width


def uniqueness_probe(config: NetworkConfig, seeds, tol: float = DEFAULT_SOLVE_TOL):
    """Solve from several seeds; returns (points, max pairwise distance)."""
    pts = []
    for s in seeds:
        net, _ = solve_triple_point(config, tol=tol, seed=s, certify_field=False,
                                    spacing=0.05)
        pts.append(net.P)
    pts = np.array(pts)
    diff = pts[:, None, :] - pts[None, :, :]
    spread = float(np.max(np.hypot(diff[..., 0], diff[..., 1])))
    return pts, spread
