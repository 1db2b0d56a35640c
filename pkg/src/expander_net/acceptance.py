"""Acceptance suite: named checks with measured values and tolerances.

Each check takes a tolerance scale (tolerances are divided by it, so a
scale of 1000 tightens every bound 1000-fold) and returns a CheckResult.
Solved networks for the shared random configurations are cached per
process, so checks that reuse them do not solve twice.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .core import IvpData, integrate_ivp
from .geometry import HalfLine, nearest_segment
from .network import (NetworkConfig, inward_margin, smallest_segment_check,
                      solve_triple_point, uniqueness_probe)
from .shooting import height_for_slope, slope_for_height
from .verify import (angle_area_check, corner_evolution_error, expander_identity_residual,
                     self_similarity_residual)

TWO_THIRDS_PI = 2.0 * math.pi / 3.0
CONFIG_SEEDS = range(1000)
MIN_GAP = 0.15


@dataclass(frozen=True)
class CheckResult:
    name: str
    tag: str
    measured: float
    tolerance: float
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status}  {self.name:<18} [{self.tag}] measured={self.measured:.3e} "
                f"tol={self.tolerance:.3e} {self.detail}").rstrip()


@dataclass(frozen=True)
class Check:
    name: str
    tag: str
    run: Callable[[float], CheckResult]


def worker_count() -> int:
    """Thread cap from EXPANDER_NET_THREADS (default: number of CPUs, at most 4)."""
    env = os.environ.get("EXPANDER_NET_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, min(4, os.cpu_count() or 1))


def random_configs(n: int = 10, min_gap: float = MIN_GAP) -> list[tuple[float, float, float]]:
    """First ``n`` seeds of default_rng(seed) whose three angles are at least ``min_gap`` apart."""
    out = []
    for seed in CONFIG_SEEDS:
        th = np.sort(np.random.default_rng(seed).uniform(0.0, 2.0 * math.pi, 3))
        gaps = np.diff(np.r_[th, th[0] + 2.0 * math.pi])
        if gaps.min() >= min_gap:
            out.append(tuple(float(t) for t in th))
        if len(out) == n:
            return out
    raise RuntimeError("seed list exhausted")


@lru_cache(maxsize=None)
def _solved(angles: tuple[float, float, float]):
    t0 = time.perf_counter()
    net, report = solve_triple_point(NetworkConfig.from_angles(angles))
    return net, report, time.perf_counter() - t0


def _result(name, tag, measured, tol, detail="", ok=None):
    passed = bool(measured <= tol) if ok is None else bool(ok)
    return CheckResult(name, tag, float(measured), float(tol), passed, detail)


def check_balancing(scale: float = 1.0) -> CheckResult:
    tol_res, tol_ang, budget = 1e-8 / scale, 1e-7 / scale, 60.0 / scale
    res, dev, elapsed = 0.0, 0.0, 0.0
    for angles in random_configs():
        net, _, dt = _solved(angles)
        res = max(res, net.balance_residual)
        dev = max(dev, float(np.max(np.abs(net.pairwise_angles() - TWO_THIRDS_PI))))
        elapsed += dt
    ok = res <= tol_res and dev <= tol_ang and elapsed <= budget
    return _result("balancing", "balanced junction", res, tol_res,
                   f"angle_dev={dev:.2e} (tol {tol_ang:.0e}) time={elapsed:.1f}s "
                   f"(budget {budget:.0f}s)", ok)


def _hausdorff_on_disc(curves, lines, radius: float = 10.0, n: int = 2001) -> float:
    worst = 0.0
    for c, ln in zip(curves, lines):
        v = c.vertices
        inside = v[np.hypot(v[:, 0], v[:, 1]) <= radius]
        if len(inside):
            worst = max(worst, float(np.max(ln.distance(inside))))
        for p in np.linspace(0.0, radius, n)[:, None] * ln.direction:
            worst = max(worst, nearest_segment(v, p)[2])
    return worst


def check_mercedes(scale: float = 1.0) -> CheckResult:
    tol = 1e-10 / scale
    net, _, _ = _solved((0.0, 2.0 * math.pi / 3.0, 4.0 * math.pi / 3.0))
    P = float(np.hypot(*net.P))
    dist = _hausdorff_on_disc(net.curves, net.config.lines)
    return _result("mercedes", "symmetric network", max(P, dist), tol,
                   f"|P|={P:.2e} hausdorff={dist:.2e}")


MONO_HEIGHTS = (0.25, 0.5, 1.0, 1.5, 2.0)
MONO_SLOPES = (-1.0, -0.5, 0.0, 0.5, 1.0)


def monotonicity_violations(tol: float = 1e-10, slack_factor: float = 10.0,
                            heights=MONO_HEIGHTS, slopes=MONO_SLOPES) -> tuple[int, float]:
    """Count violated order relations on the (h, s) grid.

    Returns (violations, worst margin) where a negative margin means the
    relation held by that much.  Relations: u(x)/x decreasing; u - v
    positive and nondecreasing when v has smaller height and equal slope,
    or equal height and smaller slope; asymptotic slope ordered whenever
    (h, s) dominates componentwise.
    """
    slack = slack_factor * tol
    x = np.linspace(0.0, 8.0, 801)
    sols = {(h, s): integrate_ivp(IvpData(h, s), 8.0, tol) for h in heights for s in slopes}
    vals = {k: sol.u(x) for k, sol in sols.items()}
    violations, worst = 0, -math.inf

    def record(margin):
        nonlocal violations, worst
        worst = max(worst, margin)
        if margin > slack:
            violations += 1

    for k, u in vals.items():
        ratio = u[1:] / x[1:]
        record(float(np.max(np.diff(ratio))))
    for (h1, s1), u in vals.items():
        for (h2, s2), v in vals.items():
            if (h1, s1) == (h2, s2):
                continue
            if (h1 > h2 and s1 == s2) or (h1 == h2 and s1 > s2):
                d = u - v
                record(float(-np.min(d[1:])))
                record(float(-np.min(np.diff(d))))
            if h1 >= h2 and s1 >= s2:
                record(sols[(h2, s2)].a - sols[(h1, s1)].a)
    return violations, worst


def check_monotonicity(scale: float = 1.0) -> CheckResult:
    tol = 1e-10 / scale
    violations, worst = monotonicity_violations(tol)
    return _result("monotonicity", "height/slope monotone", violations, 0,
                   f"worst_margin={worst:.2e} slack={10 * tol:.0e}")


def check_gaussian_decay(scale: float = 1.0) -> CheckResult:
    rel = 1e-6 / scale
    worst = -math.inf
    for h in (0.5, 1.0, 2.0):
        sol = integrate_ivp(IvpData(h, 0.0))
        x = sol.x_grid
        m = (x >= 1.0) & (x <= 8.0)
        i1 = int(np.searchsorted(x, 1.0))
        bound = sol.log_w_values[i1] - 0.5 * (x[m] ** 2 - 1.0) + math.log1p(rel)
        worst = max(worst, float(np.max(sol.log_w_values[m] - bound)))
    return _result("gaussian-decay", "straight line detection", worst, 0.0,
                   "log(w / bound), must be <= 0")


def check_round_trip(scale: float = 1.0) -> CheckResult:
    tol = 1e-7 / scale
    worst = 0.0
    for h in (-3.0, -1.0, -0.1, 0.0, 0.1, 1.0, 3.0):
        back = height_for_slope(slope_for_height(h), tol=1e-12)
        worst = max(worst, abs(back - h))
    return _result("round-trip", "homeomorphism h->a", worst, tol)


ANGLE_AREA_H1 = (0.2, 0.3, 0.5)
ANGLE_AREA_H2 = (0.6, 0.8, 1.0)
ANGLE_AREA_ROTATIONS = (-math.pi / 4.0, -math.pi / 3.0)


def check_angle_area(scale: float = 1.0) -> CheckResult:
    tol, budget = 1e-4 / scale, 30.0 / scale
    t0 = time.perf_counter()
    worst = 0.0
    l = HalfLine(0.0)
    for rot in ANGLE_AREA_ROTATIONS:
        for h1 in ANGLE_AREA_H1:
            for h2 in ANGLE_AREA_H2:
                worst = max(worst, angle_area_check(l, h1, h2, rot, 1.0).rel_error)
    elapsed = time.perf_counter() - t0
    return _result("angle-area", "angle monotonicity", worst, tol,
                   f"time={elapsed:.1f}s (budget {budget:.0f}s)", worst <= tol and elapsed <= budget)


def check_pde_cross(scale: float = 1.0) -> CheckResult:
    tol = 1e-3 / scale
    slopes = (0.5, 1.0, 2.0)
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        errs = list(pool.map(corner_evolution_error, slopes))
    detail = " ".join(f"a={a}:{e:.1e}" for a, e in zip(slopes, errs))
    return _result("pde-cross", "existence for fixed h", max(errs), tol, detail)


def check_self_similarity(scale: float = 1.0) -> CheckResult:
    tol = 1e-3 / scale
    dxs = (1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0)
    res = [self_similarity_residual(1.0, 0.5, 1.0, dx=dx) for dx in dxs]
    decreasing = all(b < a for a, b in zip(res, res[1:]))
    orders = [math.log2(a / b) for a, b in zip(res, res[1:])]
    return _result("self-similarity", "graphs coincide", res[1], tol,
                   "refinement " + " ".join(f"{r:.2e}" for r in res)
                   + " orders " + " ".join(f"{o:.2f}" for o in orders),
                   res[1] <= tol and decreasing)


def check_inward_certificate(scale: float = 1.0) -> CheckResult:
    # strict inequality <P, V(P)> < 0; there is no tolerance to tighten
    worst = -math.inf
    for angles in random_configs():
        _, report, _ = _solved(angles)
        m = inward_margin(NetworkConfig.from_angles(angles), report.certificate_radius)
        worst = max(worst, float(np.max(-m)))
    return _result("inward-certificate", "degree argument", worst, 0.0,
                   "max <P,V>/|P| over 64 circle samples, must be < 0", worst < 0.0)


PLACEMENT_UNIQUE = ((0.0, 0.5, 2.0), (0.0, 1.0, 3.5), (0.3, 2.0, 4.0),
                    (1.0, 1.4, 4.5), (0.0, 2.5, 4.0))
# (angles, symmetry axis angle)
PLACEMENT_SYMMETRIC = (((math.pi / 4.0, math.pi, -math.pi / 4.0), 0.0),
                       ((0.0, 2.5, -2.5), 0.0),
                       ((math.pi / 2.0, math.pi / 2.0 + 2.0, math.pi / 2.0 - 2.0), math.pi / 2.0))


def check_placement(scale: float = 1.0) -> CheckResult:
    tol = 1e-7 / scale
    inside = 0
    for angles in PLACEMENT_UNIQUE:
        net, _, _ = _solved(angles)
        inside += smallest_segment_check(net.config, net.P)
    worst = 0.0
    for angles, axis in PLACEMENT_SYMMETRIC:
        net, _, _ = _solved(angles)
        d = abs(math.cos(axis) * net.P[1] - math.sin(axis) * net.P[0])
        worst = max(worst, d)
    return _result("placement", "smallest segment", worst, tol,
                   f"inside smallest sector {inside}/{len(PLACEMENT_UNIQUE)}",
                   worst <= tol and inside == len(PLACEMENT_UNIQUE))


UNIQUENESS_SEEDS = ((0.0, 0.0), (1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0))


def check_uniqueness(scale: float = 1.0) -> CheckResult:
    tol = 1e-7 / scale
    worst = 0.0
    for angles in random_configs():
        _, spread = uniqueness_probe(NetworkConfig.from_angles(angles), UNIQUENESS_SEEDS)
        worst = max(worst, spread)
    return _result("uniqueness", "unique network", worst, tol)


def check_expander_identity(scale: float = 1.0) -> CheckResult:
    tol = 1e-6 / scale
    worst = 0.0
    for angles in random_configs():
        net, _, _ = _solved(angles)
        worst = max(worst, max(expander_identity_residual(c) for c in net.curves))
    return _result("expander-identity", "coordinate-free equation", worst, tol)


CHECKS: tuple[Check, ...] = (
    Check("balancing", "balanced junction", check_balancing),
    Check("mercedes", "symmetric network", check_mercedes),
    Check("monotonicity", "height/slope monotone", check_monotonicity),
    Check("gaussian-decay", "straight line detection", check_gaussian_decay),
    Check("round-trip", "homeomorphism h->a", check_round_trip),
    Check("angle-area", "angle monotonicity", check_angle_area),
    Check("pde-cross", "existence for fixed h", check_pde_cross),
    Check("self-similarity", "graphs coincide", check_self_similarity),
    Check("inward-certificate", "degree argument", check_inward_certificate),
    Check("placement", "smallest segment", check_placement),
    Check("uniqueness", "unique network", check_uniqueness),
    Check("expander-identity", "coordinate-free equation", check_expander_identity),
)


def check_names() -> list[str]:
    return [c.name for c in CHECKS]


def run_checks(only=None, scale: float = 1.0) -> list[CheckResult]:
    """Run all checks (or those named in ``only``) at tolerance ``scale``."""
    selected = [c for c in CHECKS if only is None or c.name in only]
    if only is not None:
        unknown = set(only) - {c.name for c in CHECKS}
        if unknown:
            raise ValueError(f"unknown checks: {', '.join(sorted(unknown))}")
    out = []
    for c in selected:
        try:
            out.append(c.run(scale))
        except Exception as exc:  # a crashing check is a failed check
            out.append(CheckResult(c.name, c.tag, math.nan, math.nan, False,
                                   f"raised {type(exc).__name__}: {exc}"))
    return out
