"""Planar primitives: half-lines, oriented polylines and polyline queries."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from shapely.geometry import LineString, MultiPoint, Point

TWO_PI = 2.0 * math.pi


def normalize_angle(theta: float) -> float:
    """Map an angle into [0, 2*pi)."""
    t = math.fmod(float(theta), TWO_PI)
    if t < 0.0:
        t += TWO_PI
    # fmod of a value just below 0 can round up to exactly 2*pi
    if t >= TWO_PI:
        t = 0.0
    return t


def rotation_matrix(phi: float) -> np.ndarray:
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, -s], [s, c]])


def rotate(points, phi: float) -> np.ndarray:
    """Rotate points (shape (..., 2)) about the origin by ``phi``."""
    pts = np.asarray(points, dtype=float)
    return pts @ rotation_matrix(phi).T


def cross2(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def angle_between(u, v) -> float:
    """Unsigned angle in [0, pi] between two nonzero vectors."""
    return math.atan2(abs(float(cross2(u, v))), float(np.dot(u, v)))


@dataclass(frozen=True)
class HalfLine:
    """Ray {lambda * (cos theta, sin theta) : lambda >= 0}; theta is kept in [0, 2*pi)."""

    theta: float

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise ValueError(f"half-line angle must be finite, got {self.theta!r}")
        object.__setattr__(self, "theta", normalize_angle(self.theta))

    @property
    def direction(self) -> np.ndarray:
        return np.array([math.cos(self.theta), math.sin(self.theta)])

    def contains(self, point, rtol: float = 1e-14) -> bool:
        """True if ``point`` lies on the ray up to a relative tolerance."""
        p = np.asarray(point, dtype=float)
        r = float(np.hypot(*p))
        if r == 0.0:
            return True
        d = self.direction
        return abs(float(cross2(d, p))) <= rtol * r and float(np.dot(d, p)) > 0.0

    def distance(self, points) -> np.ndarray:
        """Euclidean distance from each point to the ray."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        d = self.direction
        along = np.clip(pts @ d, 0.0, None)
        return np.hypot(pts[:, 0] - along * d[0], pts[:, 1] - along * d[1])


@dataclass(frozen=True, eq=False)
class PlaneCurve:
    """Oriented polyline with unit tangents per vertex.

    Orientation runs from the first vertex towards the end that is
    asymptotic to ``asymptote``.
    """

    vertices: np.ndarray
    tangents: np.ndarray
    asymptote: HalfLine
    family_height: float
    rotation: float

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        t = np.array(self.tangents, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or t.shape != v.shape:
            raise ValueError("vertices and tangents must both have shape (n, 2)")
        v.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "tangents", t)

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def start(self) -> np.ndarray:
        return self.vertices[0]

    def scaled(self, factor: float) -> "PlaneCurve":
        return PlaneCurve(self.vertices * factor, self.tangents, self.asymptote,
                          self.family_height, self.rotation)

    def normals(self) -> np.ndarray:
        """Right-hand unit normals (tangent rotated by -pi/2)."""
        t = self.tangents
        return np.column_stack([t[:, 1], -t[:, 0]])


def menger_curvature(vertices) -> np.ndarray:
    """Signed circumscribed-circle curvature at interior vertices.

    Positive when the polyline turns left.  Returns an array of length n - 2.
    """
    v = np.asarray(vertices, dtype=float)
    a, b, c = v[:-2], v[1:-1], v[2:]
    ab = b - a
    bc = c - b
    ac = c - a
    num = 2.0 * cross2(ab, bc)
    den = np.hypot(*ab.T) * np.hypot(*bc.T) * np.hypot(*ac.T)
    with np.errstate(invalid="ignore", divide="ignore"):
        k = np.where(den > 0.0, num / den, 0.0)
    return k


def polyline_length(vertices) -> float:
    v = np.asarray(vertices, dtype=float)
    return float(np.sum(np.hypot(*np.diff(v, axis=0).T)))


def polyline_intersections(a, b) -> np.ndarray:
    """All intersection points of two polylines, shape (k, 2)."""
    inter = LineString(np.asarray(a, dtype=float)).intersection(
        LineString(np.asarray(b, dtype=float)))
    if inter.is_empty:
        return np.empty((0, 2))
    if isinstance(inter, Point):
        return np.array([[inter.x, inter.y]])
    if isinstance(inter, MultiPoint):
        return np.array([[g.x, g.y] for g in inter.geoms])
    # collinear overlap: report the vertices of the shared pieces
    pts = []
    for g in getattr(inter, "geoms", [inter]):
        pts.extend(np.asarray(g.coords))
    return np.array(pts, dtype=float).reshape(-1, 2)


def self_intersects(vertices) -> bool:
    return not LineString(np.asarray(vertices, dtype=float)).is_simple


def nearest_vertex(vertices, point) -> int:
    v = np.asarray(vertices, dtype=float)
    p = np.asarray(point, dtype=float)
    return int(np.argmin(np.hypot(v[:, 0] - p[0], v[:, 1] - p[1])))


def nearest_segment(vertices, point) -> tuple[int, float, float]:
    """Closest segment to ``point``.

    Returns (i, s, dist) where the closest point is v[i] + s * (v[i+1] - v[i]).
    """
    v = np.asarray(vertices, dtype=float)
    p = np.asarray(point, dtype=float)
    a = v[:-1]
    d = v[1:] - a
    dd = np.einsum("ij,ij->i", d, d)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(dd > 0, np.einsum("ij,ij->i", p - a, d) / dd, 0.0)
    s = np.clip(s, 0.0, 1.0)
    closest = a + s[:, None] * d
    dist = np.hypot(closest[:, 0] - p[0], closest[:, 1] - p[1])
    i = int(np.argmin(dist))
    return i, float(s[i]), float(dist[i])


def signed_side(vertices, point) -> float:
    """Signed distance of ``point`` to an open polyline (positive on the left).

    The first and last segments are treated as rays so that points beyond the
    truncated ends still get the side of the conceptually infinite curve.
    """
    v = np.asarray(vertices, dtype=float)
    p = np.asarray(point, dtype=float)
    i, s, dist = nearest_segment(v, p)
    seg = v[i + 1] - v[i]
    side = float(cross2(seg, p - v[i]))
    if (i == 0 and s == 0.0) or (i == len(v) - 2 and s == 1.0):
        # beyond an end: use the perpendicular distance to the extended ray
        n = float(np.hypot(*seg))
        return side / n
    return math.copysign(dist, side) if side != 0.0 else 0.0


def distance_to_lines(points, lines) -> np.ndarray:
    """Distance from each point to the union of the given half-lines."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return np.min(np.stack([ln.distance(pts) for ln in lines]), axis=0)
