import math

import pytest

from commwheel.geometry import Point
from commwheel.network import (
    Network,
    NodeClass,
    build_udg,
    classify_all,
    generate_honeycomb_family,
    generate_random,
    strong_interior,
    strong_interior_connected,
)

RIM_RADIUS = 0.48
OUTER_RADIUS = 1.005
RIM_OFFSETS = [0.9, -1.2, 0.7, -0.5, 1.1]      # degrees
OUTER_OFFSETS = [-1.4, 1.0, -0.8, 1.3, -0.6]


def build_two_ring(origin=Point(0.0, 0.0), id_base=0) -> dict[int, Point]:
    """Hub + pentagon of rim nodes + radial outer ring (11 nodes).

    The hub is strongly interior, the five rims are non-isolated weakly
    interior with valid wheels, and the five outers are boundary.
    """
    pts = {id_base: origin}
    for i in range(5):
        a = math.radians(72 * i + RIM_OFFSETS[i])
        pts[id_base + 1 + i] = Point(origin.x + RIM_RADIUS * math.cos(a),
                                     origin.y + RIM_RADIUS * math.sin(a))
    for i in range(5):
        a = math.radians(72 * i + OUTER_OFFSETS[i])
        pts[id_base + 6 + i] = Point(origin.x + OUTER_RADIUS * math.cos(a),
                                     origin.y + OUTER_RADIUS * math.sin(a))
    return pts


@pytest.fixture(scope="session")
def two_ring() -> Network:
    net = build_udg(build_two_ring(), 1.0)
    classes = classify_all(net)
    assert classes[0] is NodeClass.STRONG
    assert all(classes[i] is NodeClass.WEAK for i in range(1, 6))
    assert all(classes[i] is NodeClass.BOUNDARY for i in range(6, 11))
    return net


@pytest.fixture(scope="session")
def pentagon() -> Network:
    """Hub with five rim neighbors at ~0.8; hub interior, rims boundary."""
    pts = {0: Point(0.0, 0.0)}
    offs = [1.3, -0.9, 0.6, -1.1, 0.8]
    radii = [0.79, 0.81, 0.8, 0.785, 0.805]
    for i in range(5):
        a = math.radians(72 * i + offs[i])
        pts[1 + i] = Point(radii[i] * math.cos(a), radii[i] * math.sin(a))
    net = build_udg(pts, 1.0)
    assert net.neighbors(0) == [1, 2, 3, 4, 5]
    for i in range(1, 6):
        assert net.degree(i) == 3  # hub plus the two ring siblings
    return net


@pytest.fixture(scope="session")
def dumbbell() -> Network:
    """Two two-ring clusters joined by a boundary chain.

    The strong interior is exactly the two hubs, which are far apart, so it
    is nonempty but disconnected: the NoLeader case.
    """
    shift = 12.0
    pts = build_two_ring()
    pts.update(build_two_ring(origin=Point(shift, 0.0), id_base=11))
    ys = [0.013, -0.017, 0.021, -0.009, 0.016, -0.02, 0.008, -0.014,
          0.019, -0.011, 0.015, -0.018]
    a_anchor = pts[6]   # outer of cluster A near angle 0
    b_anchor = pts[11 + 6 + 2]  # outer of cluster B near angle 144
    dx, dy = b_anchor.x - a_anchor.x, b_anchor.y - a_anchor.y
    length = math.hypot(dx, dy)
    px, py = -dy / length, dx / length
    for j in range(12):
        t = (j + 1) / 13.0
        pts[22 + j] = Point(a_anchor.x + t * dx + ys[j] * px,
                            a_anchor.y + t * dy + ys[j] * py)
    net = build_udg(pts, 1.0)
    classes = classify_all(net)
    assert strong_interior(classes) == {0, 11}
    assert not strong_interior_connected(net, classes)
    return net


@pytest.fixture(scope="session")
def honeycombs() -> dict[int, Network]:
    return {k: generate_honeycomb_family(k) for k in (1, 2, 3)}


def pool_network(i: int) -> Network:
    """Deterministic member i of the module-test network pool."""
    n = (50, 70, 90, 110)[i % 4]
    deg = (12, 16, 20)[i % 3]
    side = math.sqrt(n * math.pi / deg)
    return generate_random(n, side, side, 1.0, 31_000 + i)


@pytest.fixture(scope="session")
def small_pool() -> list[Network]:
    return [pool_network(i) for i in range(24)]


# Frozen seed-search results: small random networks whose protocol traces
# exercise specific message paths cleanly (verified in test_protocol).
TYPE4_FIXTURE = dict(n=40, deg=14, seed=500_109)
TYPE3_FIXTURE = dict(n=40, deg=14, seed=700_043)


def fixture_network(spec: dict) -> Network:
    side = math.sqrt(spec["n"] * math.pi / spec["deg"])
    return generate_random(spec["n"], side, side, 1.0, spec["seed"])
