import math

import numpy as np
import pytest

from expander_net.errors import (ConfigMismatch, DegenerateInput, NoIntersection,
                                 StabilityViolation)
from expander_net.geometry import HalfLine
from expander_net.network import ExpandingNetwork, NetworkConfig, solve_triple_point
from expander_net.shooting import _shoot, curve_from_point, expander_curve
from expander_net.verify import (PdeProfile, angle_area_check, angle_chain_diagnostic,
                                 corner_evolution_error, evolve_graph_csf,
                                 expander_identity_residual, self_similarity_residual,
                                 uniform_grid)

X_AXIS = HalfLine(0.0)


def test_angle_area_identity():
    r = angle_area_check(X_AXIS, 0.5, 1.0, -math.pi / 4, 1.0)
    assert r.area > 0
    assert r.rel_error <= 1e-4
    assert r.lhs == pytest.approx(r.orientation * r.rhs, rel=1e-8)
    assert r.tail_bound < 1e-10 and r.quadrature_change < 1e-9


def test_angle_area_quarter_turn_misses():
    # c_1 and its quarter-turn copy live in disjoint sectors
    with pytest.raises(NoIntersection):
        angle_area_check(X_AXIS, 0.5, 1.0, math.pi / 2, 1.0)


def test_angle_area_degenerate_and_swap():
    r = angle_area_check(X_AXIS, 0.5, 0.5, -math.pi / 4, 1.0)
    assert r.lhs == 0.0 and r.area == 0.0
    a = angle_area_check(X_AXIS, 0.5, 1.0, -math.pi / 4, 1.0)
    b = angle_area_check(X_AXIS, 1.0, 0.5, -math.pi / 4, 1.0)
    assert b.lhs == pytest.approx(-a.lhs, abs=1e-14)
    assert b.area == pytest.approx(a.area, rel=1e-10)


def test_angle_increases_along_b():
    reports = [angle_area_check(X_AXIS, h, 1.0, -math.pi / 4, 1.0) for h in (0.2, 0.5, 0.8)]
    # order the crossings by their position along b (orientation -1: later crossing first)
    alphas = [r.alpha1 for r in reports][::-1]
    assert alphas[0] < alphas[1] < alphas[2]


def test_line_is_static_under_graph_flow():
    x = uniform_grid(4.0, 1.0 / 16)
    out = evolve_graph_csf(PdeProfile(x, 0.7 * x, 0.0), 0.3, lambda t: (-2.8, 2.8))
    assert np.max(np.abs(out.u - 0.7 * x)) < 1e-13
    assert out.t == 0.3


def test_stability_ratio_enforced():
    x = uniform_grid(1.0, 0.25)
    with pytest.raises(StabilityViolation):
        evolve_graph_csf(PdeProfile(x, x, 0.0), 1.0, lambda t: (-1.0, 1.0), ratio=1.0)


def test_corner_flow_converges_to_expander():
    errs = [corner_evolution_error(1.0, dx=dx) for dx in (1 / 16, 1 / 32, 1 / 64)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-3


def test_self_similarity_residual():
    assert self_similarity_residual(1.0, 0.5, 0.5) == 0.0
    assert self_similarity_residual(0.0, 0.5, 1.0) == 0.0
    r = [self_similarity_residual(1.0, 0.5, 1.0, dx=dx) for dx in (1 / 16, 1 / 32)]
    assert r[1] < r[0] and r[1] < 1e-3


def test_expander_identity_on_curves():
    for h in (0.3, 1.0):
        assert expander_identity_residual(expander_curve(h, HalfLine(0.7))) < 1e-6
    scaled = expander_curve(1.0, HalfLine(0.7)).scaled(2.0)
    assert expander_identity_residual(scaled, t=2.0) < 1e-6
    assert expander_identity_residual(scaled, t=0.5) > 0.1


@pytest.fixture(scope="module")
def arrow_pair():
    cfg = NetworkConfig.from_angles((math.pi / 4, math.pi, -math.pi / 4))
    net, _ = solve_triple_point(cfg)
    P2 = net.P + np.array([0.0, 0.1])
    shots = [_shoot(P2, ln) for ln in cfg.lines]
    T = np.array([s.tangent_at_P for s in shots])
    bad = ExpandingNetwork(P=P2, curves=tuple(curve_from_point(s, ln)
                                              for s, ln in zip(shots, cfg.lines)),
                           tangents=T, balance_residual=float(np.hypot(*T.sum(axis=0))),
                           config=cfg)
    return net, bad


def test_angle_chain_flags_unbalanced(arrow_pair):
    net, bad = arrow_pair
    r = angle_chain_diagnostic(net, bad)
    assert r.b_network == 2
    assert r.zeta < 2 * math.pi / 3
    assert r.mismatch >= 0.01
    assert r.monotone and r.triangle


def test_angle_chain_rejects_bad_input(arrow_pair):
    net, _ = arrow_pair
    with pytest.raises(DegenerateInput):
        angle_chain_diagnostic(net, net)
    other, _ = solve_triple_point(NetworkConfig.from_angles((0, 120, 240), degrees=True))
    with pytest.raises(ConfigMismatch):
        angle_chain_diagnostic(net, other)
