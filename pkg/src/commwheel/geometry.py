"""Planar primitives for disks of a single common radius.

Every node in the network has the same communication radius r, so all circle
intersections here are between equal-radius circles.  Angles are radians,
normalized to [0, 2*pi).  Length comparisons against r use a small relative
tolerance band; the network generators keep all real distances well clear of
the decision boundaries, so the band never flips a verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi

# Relative tolerance (times r) for coverage / adjacency style comparisons.
REL_TOL = 1e-9
# Absolute tolerance for angular containment and arc-union gap tests.
ANGLE_TOL = 1e-9


class DegenerateGeometryError(ValueError):
    """Input configuration outside an operation's validity range."""


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __iter__(self):
        yield self.x
        yield self.y


ORIGIN = Point(0.0, 0.0)


def distance(p: Point, q: Point) -> float:
    """Euclidean distance between two points."""
    return math.hypot(p.x - q.x, p.y - q.y)


def normalize_angle(theta: float) -> float:
    """Wrap an angle to [0, 2*pi)."""
    t = math.fmod(theta, TWO_PI)
    if t < 0.0:
        t += TWO_PI
    return t if t < TWO_PI else 0.0


def angle_gap(a: float, b: float) -> float:
    """Absolute circular distance between two angles, in [0, pi]."""
    d = abs(normalize_angle(a) - normalize_angle(b))
    return min(d, TWO_PI - d)


def polar_angle(origin: Point, p: Point) -> float:
    """Polar angle of p about origin, in [0, 2*pi)."""
    return normalize_angle(math.atan2(p.y - origin.y, p.x - origin.x))


def point_on_circle(center: Point, r: float, theta: float) -> Point:
    return Point(center.x + r * math.cos(theta), center.y + r * math.sin(theta))


@dataclass(frozen=True)
class AngularInterval:
    """A closed arc on a circle: all angles within half_width of center."""

    center: float
    half_width: float

    def __post_init__(self):
        if not 0.0 <= self.half_width < math.pi:
            raise DegenerateGeometryError(
                f"half_width {self.half_width} outside [0, pi)")
        object.__setattr__(self, "center", normalize_angle(self.center))

    @property
    def start(self) -> float:
        """CW endpoint (center - half_width), normalized."""
        return normalize_angle(self.center - self.half_width)

    @property
    def end(self) -> float:
        """CCW endpoint (center + half_width), normalized."""
        return normalize_angle(self.center + self.half_width)

    def contains_angle(self, theta: float, tol: float = ANGLE_TOL) -> bool:
        return angle_gap(theta, self.center) <= self.half_width + tol

    def contains_interval(self, other: "AngularInterval",
                          tol: float = ANGLE_TOL) -> bool:
        """True iff other is a subset of this arc (within tol)."""
        gap = angle_gap(other.center, self.center)
        return gap + other.half_width <= self.half_width + tol


def coverage_interval(v: Point, u: Point, r: float) -> AngularInterval:
    """Arc of the circle around v that lies inside the disk around u.

    A point at angle theta on the radius-r circle around v is within r of u
    exactly when cos(theta - phi_u) >= d/(2r), with d the center distance.
    """
    d = distance(v, u)
    if d <= 0.0:
        raise DegenerateGeometryError("coincident centers")
    if d > r * (1.0 + REL_TOL):
        raise DegenerateGeometryError(f"centers too far apart: {d} > r={r}")
    half_width = math.acos(min(1.0, d / (2.0 * r)))
    return AngularInterval(polar_angle(v, u), half_width)


def boundary_intersections(v: Point, u: Point, r: float) -> tuple[Point, Point]:
    """The two intersection points of the radius-r circles around v and u.

    Returned as (ccw, cw): walking clockwise along v's circle from the first
    to the second sweeps the short way (< pi) past u's direction.
    """
    d = distance(v, u)
    if d <= 0.0:
        raise DegenerateGeometryError("coincident centers")
    if d > r * (1.0 + REL_TOL):
        raise DegenerateGeometryError(f"circles do not intersect: d={d}, r={r}")
    phi = polar_angle(v, u)
    w = math.acos(min(1.0, d / (2.0 * r)))
    return point_on_circle(v, r, phi + w), point_on_circle(v, r, phi - w)


def covers(p: Point, center: Point, r: float, tol: float = 0.0) -> bool:
    """Closed-disk membership: distance(p, center) <= r + tol."""
    return distance(p, center) <= r + tol


def locate_by_two_distances(a: Point, b: Point, da: float,
                            db: float) -> tuple[Point, Point]:
    """Both points at distance da from a and db from b.

    The two solutions are mirror images across line ab; the one on the
    positive side of the directed segment a->b comes first, so callers get a
    deterministic order.
    """
    d = distance(a, b)
    scale = max(d, da, db)
    tol = REL_TOL * scale
    if d <= tol:
        raise DegenerateGeometryError("reference points coincide")
    if d >= da + db - tol or d <= abs(da - db) + tol:
        raise DegenerateGeometryError(
            f"circles tangent or disjoint: d={d}, da={da}, db={db}")
    along = (da * da - db * db + d * d) / (2.0 * d)
    h2 = da * da - along * along
    if h2 <= (tol * tol):
        raise DegenerateGeometryError("tangent configuration")
    h = math.sqrt(h2)
    ex, ey = (b.x - a.x) / d, (b.y - a.y) / d
    fx, fy = a.x + along * ex, a.y + along * ey
    return (Point(fx - h * ey, fy + h * ex),
            Point(fx + h * ey, fy - h * ex))


def triangle_height(a: Point, b: Point, c: Point) -> float:
    """Smallest altitude of the triangle abc (0 when collinear)."""
    cross = abs((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x))
    longest = max(distance(a, b), distance(a, c), distance(b, c))
    if longest == 0.0:
        return 0.0
    return cross / longest


def locate_by_three_distances(refs: tuple[Point, Point, Point],
                              dists: tuple[float, float, float],
                              rel_tol: float = 1e-6) -> Point:
    """The unique point at the given distances from three non-collinear refs.

    Solves the linearized system from differencing the circle equations and
    validates the answer against all three constraints.
    """
    (p1, p2, p3), (d1, d2, d3) = refs, dists
    scale = max(distance(p1, p2), distance(p1, p3), distance(p2, p3),
                d1, d2, d3)
    if scale <= 0.0:
        raise DegenerateGeometryError("degenerate reference set")
    if triangle_height(p1, p2, p3) < 1e-9 * scale:
        raise DegenerateGeometryError("collinear reference points")
    # 2*(p2-p1).q = (d1^2 - d2^2) + (|p2|^2 - |p1|^2), same for (p3-p1).
    a11, a12 = 2.0 * (p2.x - p1.x), 2.0 * (p2.y - p1.y)
    a21, a22 = 2.0 * (p3.x - p1.x), 2.0 * (p3.y - p1.y)
    b1 = d1 * d1 - d2 * d2 + (p2.x ** 2 + p2.y ** 2) - (p1.x ** 2 + p1.y ** 2)
    b2 = d1 * d1 - d3 * d3 + (p3.x ** 2 + p3.y ** 2) - (p1.x ** 2 + p1.y ** 2)
    det = a11 * a22 - a12 * a21
    q = Point((b1 * a22 - b2 * a12) / det, (a11 * b2 - a21 * b1) / det)
    residual = max(abs(distance(q, p) - d) for p, d in zip(refs, dists))
    if residual > rel_tol * scale:
        raise DegenerateGeometryError(
            f"distances inconsistent with a common point: residual {residual}")
    return q


def arcs_cover_circle(arcs: list[AngularInterval],
                      tol: float = ANGLE_TOL) -> bool:
    """True iff the union of the closed arcs is the whole circle.

    Exact sweep over endpoints: the circle is cut at the start of one arc and
    every arc is mapped to linear segments of [cut, cut + 2*pi]; a gap wider
    than tol anywhere means uncovered.
    """
    if not arcs:
        return False
    if any(a.half_width >= math.pi - tol for a in arcs):
        return True
    cut = arcs[0].start
    segments = []
    for a in arcs:
        lo = normalize_angle(a.start - cut)
        hi = lo + 2.0 * a.half_width
        segments.append((lo, min(hi, TWO_PI)))
        if hi > TWO_PI:
            segments.append((0.0, hi - TWO_PI))
    segments.sort()
    reach = 0.0
    for lo, hi in segments:
        if lo > reach + tol:
            return False
        reach = max(reach, hi)
        if reach >= TWO_PI - tol:
            return True
    return reach >= TWO_PI - tol


@dataclass(frozen=True)
class Isometry:
    """Rigid map of the plane (rotation or reflection plus translation)."""

    linear: tuple[tuple[float, float], tuple[float, float]]
    translation: Point

    def __post_init__(self):
        (a, b), (c, d) = self.linear
        if (abs(a * a + c * c - 1.0) > 1e-9 or abs(b * b + d * d - 1.0) > 1e-9
                or abs(a * b + c * d) > 1e-9):
            raise DegenerateGeometryError("linear part is not orthogonal")

    @property
    def determinant(self) -> float:
        (a, b), (c, d) = self.linear
        return a * d - b * c

    def apply(self, p: Point) -> Point:
        (a, b), (c, d) = self.linear
        return Point(a * p.x + b * p.y + self.translation.x,
                     c * p.x + d * p.y + self.translation.y)


IDENTITY = Isometry(((1.0, 0.0), (0.0, 1.0)), ORIGIN)


def fit_isometry(src: tuple[Point, Point, Point],
                 dst: tuple[Point, Point, Point],
                 rel_tol: float = 1e-6) -> Isometry:
    """Rigid map (possibly reflecting) sending each src point to its dst.

    Requires the triangles to be congruent; three correspondences pin the map
    completely, including its handedness.
    """
    s0, s1, s2 = src
    t0, t1, t2 = dst
    scale = max(distance(s0, s1), distance(s0, s2), distance(s1, s2))
    if scale <= 0.0:
        raise DegenerateGeometryError("degenerate source triangle")
    if triangle_height(s0, s1, s2) < 1e-9 * scale:
        raise DegenerateGeometryError("collinear source points")
    for (a, b), (c, d) in (((s0, s1), (t0, t1)), ((s0, s2), (t0, t2)),
                           ((s1, s2), (t1, t2))):
        if abs(distance(a, b) - distance(c, d)) > rel_tol * scale:
            raise DegenerateGeometryError("triangles are not congruent")

    def frame(p0: Point, p1: Point, p2: Point, flip: bool):
        ux, uy = p1.x - p0.x, p1.y - p0.y
        n = math.hypot(ux, uy)
        ux, uy = ux / n, uy / n
        vx, vy = -uy, ux
        if flip:
            vx, vy = uy, -ux
        return (ux, uy), (vx, vy)

    s_cross = ((s1.x - s0.x) * (s2.y - s0.y) - (s1.y - s0.y) * (s2.x - s0.x))
    t_cross = ((t1.x - t0.x) * (t2.y - t0.y) - (t1.y - t0.y) * (t2.x - t0.x))
    reflect = (s_cross > 0.0) != (t_cross > 0.0)
    (e1x, e1y), (e2x, e2y) = frame(s0, s1, s2, flip=False)
    (f1x, f1y), (f2x, f2y) = frame(t0, t1, t2, flip=reflect)
    # L = F @ E^T with orthonormal columns E = [e1 e2], F = [f1 f2].
    a = f1x * e1x + f2x * e2x
    b = f1x * e1y + f2x * e2y
    c = f1y * e1x + f2y * e2x
    d = f1y * e1y + f2y * e2y
    t = Point(t0.x - (a * s0.x + b * s0.y), t0.y - (c * s0.x + d * s0.y))
    iso = Isometry(((a, b), (c, d)), t)
    residual = max(distance(iso.apply(s), tgt) for s, tgt in zip(src, dst))
    if residual > 1e-9 * scale + rel_tol * scale:
        raise DegenerateGeometryError(f"isometry residual too large: {residual}")
    return iso
