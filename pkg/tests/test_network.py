import math

import numpy as np
import pytest

from expander_net.errors import InvalidConfig, NoUniqueSmallestSegment
from expander_net.geometry import rotate
from expander_net.network import (NetworkConfig, certify, network_at_time, sector_angles,
                                  sector_area_rates, smallest_segment_check, smallest_sector,
                                  solve_triple_point, tangent_field)
from expander_net.shooting import curve_through_point

# Zeros of the field component along the symmetry axis, found by Brent's method
# on a 1-D line (no Newton, no grid search).
P_X_AXIS = 0.2725223901558096     # angles (pi/4, pi, -pi/4), P = (p, 0)
P_DIAGONAL = 0.1927024301043384   # angles (0, pi/2, 5 pi/4), P = (p, p)


@pytest.fixture(scope="module")
def arrow():
    return solve_triple_point(NetworkConfig.from_angles((math.pi / 4, math.pi, -math.pi / 4)))


def test_config_validation():
    with pytest.raises(InvalidConfig, match="pairwise distinct"):
        NetworkConfig.from_angles((0, 0, 90), degrees=True)
    with pytest.raises(InvalidConfig):
        NetworkConfig.from_angles((0.0, 2 * math.pi, 1.0))
    with pytest.raises(InvalidConfig):
        NetworkConfig.from_angles((0.0, 1.0))


def test_mercedes_is_exact():
    net, report = solve_triple_point(NetworkConfig.from_angles((0, 120, 240), degrees=True))
    assert np.hypot(*net.P) <= 1e-10
    assert net.balance_residual <= 1e-9
    assert np.allclose(net.pairwise_angles(), 2 * math.pi / 3, atol=1e-9)
    assert report.certificate_radius == 16.0


def test_symmetric_config_against_axis_oracle(arrow):
    net, report = arrow
    assert net.P[0] == pytest.approx(P_X_AXIS, abs=1e-8)
    assert abs(net.P[1]) <= 1e-8
    assert report.residual <= 1e-10
    assert np.allclose(net.pairwise_angles(), 2 * math.pi / 3, atol=1e-8)


def test_diagonal_config_against_axis_oracle():
    net, _ = solve_triple_point(NetworkConfig.from_angles((0, math.pi / 2, 5 * math.pi / 4)),
                                certify_field=False)
    assert net.P == pytest.approx([P_DIAGONAL, P_DIAGONAL], abs=1e-8)


def test_network_curves_start_at_P_and_do_not_cross(arrow):
    from expander_net.geometry import polyline_intersections
    net, _ = arrow
    for c, T in zip(net.curves, net.tangents):
        assert np.allclose(c.start, net.P, atol=1e-9)
        assert np.allclose(c.tangents[0], T, atol=1e-9)
    for i in range(3):
        for j in range(i + 1, 3):
            pts = polyline_intersections(net.curves[i].vertices[1:], net.curves[j].vertices[1:])
            assert len(pts) == 0


def test_rotation_equivariance(arrow):
    net, _ = arrow
    phi = 0.7
    rot, _ = solve_triple_point(net.config.rotated(phi), certify_field=False)
    assert rot.P == pytest.approx(rotate(net.P, phi), abs=1e-8)


def test_reflection_equivariance():
    cfg = NetworkConfig.from_angles((0.3, 2.0, 4.0))
    net, _ = solve_triple_point(cfg, certify_field=False)
    ref, _ = solve_triple_point(cfg.reflected(0.0), certify_field=False)
    assert ref.P == pytest.approx([net.P[0], -net.P[1]], abs=1e-8)


def test_field_is_sum_of_shot_tangents():
    cfg = NetworkConfig.from_angles((0.3, 2.0, 4.0))
    P = np.array([0.4, -0.7])
    V = tangent_field(cfg, P)
    # chord directions of the first polyline segments approximate the tangents
    chords = []
    for ln in cfg.lines:
        v = curve_through_point(P, ln, spacing=1e-5).curve.vertices
        d = v[1] - v[0]
        chords.append(d / np.hypot(*d))
    assert V == pytest.approx(np.sum(chords, axis=0), abs=1e-4)


def test_field_vanishes_at_mercedes_origin():
    V = tangent_field(NetworkConfig.from_angles((0, 120, 240), degrees=True), (0.0, 0.0))
    assert np.hypot(*V) <= 1e-12


def test_certificate_inward():
    radius, margin = certify(NetworkConfig.from_angles((0.3, 2.0, 4.0)))
    assert radius == 16.0 and margin > 0.9


def test_time_scaling(arrow):
    net, _ = arrow
    later = network_at_time(net, 2.0)
    assert later.P == pytest.approx(2.0 * net.P)
    assert later.curves[0].vertices == pytest.approx(2.0 * net.curves[0].vertices)
    assert np.array_equal(later.tangents, net.tangents)


def test_sector_angles_example():
    cfg = NetworkConfig.from_angles((math.pi / 4, math.pi, -math.pi / 4))
    assert sector_angles(cfg) == pytest.approx([math.pi / 2, 3 * math.pi / 4, 3 * math.pi / 4])
    assert sum(sector_area_rates(cfg)) == pytest.approx(0.0, abs=1e-12)
    start, width = smallest_sector(cfg)
    assert width == pytest.approx(math.pi / 2)
    assert start == pytest.approx(7 * math.pi / 4)


def test_smallest_sector_tie_raises():
    with pytest.raises(NoUniqueSmallestSegment):
        smallest_sector(NetworkConfig.from_angles((0, 120, 240), degrees=True))


def test_triple_point_in_smallest_sector(arrow):
    net, _ = arrow
    assert smallest_segment_check(net.config, net.P)
    assert not smallest_segment_check(net.config, -net.P)
