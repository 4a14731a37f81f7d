import itertools
import math
import random

import numpy as np
import pytest

from commwheel.geometry import Point, distance, point_on_circle
from commwheel.network import (
    GenerationError,
    NetworkError,
    NodeClass,
    build_knowledge,
    build_udg,
    classify_all,
    generate_honeycomb_family,
    generate_random,
    interior_oracle,
    is_maximal_neighbor,
    node_knowledge,
    preceq,
    strong_interior,
    strong_interior_connected,
)


def test_build_udg_two_nodes():
    net = build_udg([Point(0, 0), Point(0.5, 0)], 1.0)
    assert net.edges() == [(0, 1)]
    assert net.adjacency[0][1] == pytest.approx(0.5)


def test_build_udg_disconnected_rejected():
    with pytest.raises(NetworkError, match="not connected"):
        build_udg([Point(0, 0), Point(2, 0), Point(1, math.sqrt(3))], 1.0)


def test_build_udg_near_r_rejected():
    with pytest.raises(NetworkError, match="within"):
        build_udg([Point(0, 0), Point(1.0 + 1e-9, 0)], 1.0)


def test_build_udg_collinear_rejected():
    with pytest.raises(NetworkError, match="collinear"):
        build_udg([Point(0, 0), Point(0.5, 0), Point(0.9, 1e-9),
                   Point(0.5, 0.5)], 1.0)


def test_build_udg_edges_match_brute_force(small_pool):
    for net in small_pool[:6]:
        expected = set()
        ids = net.ids
        for u, v in itertools.combinations(ids, 2):
            if distance(net.positions[u], net.positions[v]) <= net.r:
                expected.add((u, v))
        assert set(net.edges()) == expected


def _knowledge_for_points(points: dict[int, Point], r: float = 1.0):
    net = build_udg(points, r)
    return net, build_knowledge(net)


def test_preceq_nested_arcs():
    net, know = _knowledge_for_points(
        {0: Point(0, 0), 1: Point(0.9, 0), 2: Point(0.5, 0.001)})
    # arc half-widths arccos(0.45) vs arccos(0.25), nearly same center
    assert preceq(know[0], 1, 2)
    assert not preceq(know[0], 2, 1)


def test_preceq_shifted_center_not_nested():
    a = math.radians(30)
    net, know = _knowledge_for_points(
        {0: Point(0, 0), 1: Point(0.9 * math.cos(a), 0.9 * math.sin(a)),
         2: Point(0.5, 0.001)})
    assert not preceq(know[0], 1, 2)


def test_preceq_reflexive():
    net, know = _knowledge_for_points({0: Point(0, 0), 1: Point(0.7, 0.01)})
    assert preceq(know[0], 1, 1)


def test_preceq_non_adjacent_is_false(small_pool):
    net = small_pool[0]
    know = build_knowledge(net)
    found = 0
    for v in net.ids:
        k = know[v]
        for u, u2 in itertools.combinations(k.neighbors, 2):
            if not k.are_adjacent(u, u2):
                found += 1
                assert not preceq(k, u, u2)
                assert not preceq(k, u2, u)
        if found > 50:
            break
    assert found > 0


def test_preceq_matches_arc_sampling(small_pool):
    # Distance-only preceq equals set inclusion of the coverage arcs,
    # sampled densely across the candidate arc including its endpoints.
    for net in small_pool[:4]:
        know = build_knowledge(net)
        r = net.r
        for v in net.ids:
            k = know[v]
            pv = net.positions[v]
            for u, u2 in itertools.permutations(k.neighbors, 2):
                arc_u = _arc(net, v, u)
                arc_u2 = _arc(net, v, u2)
                thetas = np.linspace(arc_u.center - arc_u.half_width + 1e-9,
                                     arc_u.center + arc_u.half_width - 1e-9,
                                     40)
                pu2 = net.positions[u2]
                contained = all(
                    distance(point_on_circle(pv, r, t), pu2) <= r + 1e-7
                    for t in thetas)
                assert preceq(k, u, u2) == contained, (v, u, u2)


def _arc(net, v, u):
    from commwheel.geometry import coverage_interval
    return coverage_interval(net.positions[v], net.positions[u], net.r)


def test_maximal_closest_neighbor(small_pool):
    # Lemma: a dominated neighbor is strictly farther, so the closest
    # neighbor can never be dominated.
    for net in small_pool[:8]:
        know = build_knowledge(net)
        for v in net.ids:
            k = know[v]
            closest = min(k.neighbors, key=lambda u: (k.dist_to(u), u))
            assert is_maximal_neighbor(k, closest)


def test_maximal_dominated_configuration():
    net, know = _knowledge_for_points(
        {0: Point(0, 0), 1: Point(0.9, 0), 2: Point(0.5, 0.001)})
    assert not is_maximal_neighbor(know[0], 1)
    assert is_maximal_neighbor(know[0], 2)


def test_maximal_single_neighbor():
    net, know = _knowledge_for_points({0: Point(0, 0), 1: Point(0.7, 0.01)})
    assert is_maximal_neighbor(know[0], 1)


def test_interior_oracle_pentagon(pentagon):
    assert interior_oracle(pentagon, 0)
    for v in range(1, 6):
        assert not interior_oracle(pentagon, v)


def test_interior_oracle_small_cases():
    net = build_udg({0: Point(0, 0), 1: Point(0.7, 0.01)}, 1.0)
    assert not interior_oracle(net, 0)
    net = build_udg({0: Point(0, 0), 1: Point(0.7, 0.01),
                     2: Point(-0.69, 0.05)}, 1.0)
    assert not interior_oracle(net, 0)


def test_interior_oracle_far_from_border_covered(small_pool):
    # In a dense random network, a node whose arcs do cover its circle is
    # interior per the oracle regardless of anything else.
    net = small_pool[1]
    inner = [v for v in net.ids if interior_oracle(net, v)]
    assert inner, "expected interior nodes in a dense pool network"


def test_classify_sparse_ring_all_boundary():
    pts = {}
    for i in range(8):
        a = 2 * math.pi * i / 8 + 0.005 * (-1) ** i
        pts[i] = Point(2.0 * math.cos(a), 2.0 * math.sin(a))
    net = build_udg(pts, 1.6)
    classes = classify_all(net)
    assert all(c is NodeClass.BOUNDARY for c in classes.values())


def test_classify_honeycomb_rings(honeycombs):
    # Boundary ring (red), weakly interior ring (green), strong core (blue).
    for k, net in honeycombs.items():
        classes = classify_all(net)
        counts = {c: sum(1 for x in classes.values() if x is c)
                  for c in NodeClass}
        assert counts[NodeClass.BOUNDARY] == 6 * (k + 1)
        assert counts[NodeClass.WEAK] == 6 * k
        assert counts[NodeClass.STRONG] == net.n - 6 * (2 * k + 1)
        assert counts[NodeClass.ISOLATED_WEAK] == 0


def test_classify_consistent_with_oracle_on_honeycomb(honeycombs):
    # On the lattice fixtures the distributed verdict matches the oracle.
    for net in honeycombs.values():
        classes = classify_all(net)
        for v in net.ids:
            assert (classes[v] is not NodeClass.BOUNDARY) == interior_oracle(net, v)


def test_classify_is_partition(small_pool):
    for net in small_pool[:6]:
        classes = classify_all(net)
        assert set(classes) == set(net.ids)
        strong = strong_interior(classes)
        for v in strong:
            for u in net.neighbors(v):
                assert classes[u] is not NodeClass.BOUNDARY


def test_strong_interior_connected_cases(two_ring, dumbbell):
    classes = classify_all(two_ring)
    assert strong_interior(classes) == {0}
    assert strong_interior_connected(two_ring, classes)

    classes = {v: NodeClass.BOUNDARY for v in two_ring.ids}
    assert not strong_interior_connected(two_ring, classes)

    classes = classify_all(dumbbell)
    assert not strong_interior_connected(dumbbell, classes)


def test_generate_random_deterministic():
    a = generate_random(60, 4.0, 4.0, 1.0, 77)
    b = generate_random(60, 4.0, 4.0, 1.0, 77)
    assert a.positions == b.positions
    assert a.edges() == b.edges()
    c = generate_random(60, 4.0, 4.0, 1.0, 78)
    assert a.positions != c.positions


def test_generate_random_margins():
    net = generate_random(80, 4.5, 4.5, 1.0, 5)
    ids = net.ids
    for u, v in itertools.combinations(ids, 2):
        d = distance(net.positions[u], net.positions[v])
        assert d >= 1e-3
        assert abs(d - net.r) >= 1e-6


def test_generate_random_tiny_region_complete():
    net = generate_random(4, 0.5, 0.5, 1.0, 3)
    assert net.edge_count() == 6


def test_generate_random_gives_up():
    with pytest.raises(GenerationError):
        generate_random(4, 100.0, 100.0, 1.0, 0, max_attempts=5)


def test_honeycomb_sizes_strictly_increase(honeycombs):
    sizes = [honeycombs[k].n for k in (1, 2, 3)]
    assert sizes == sorted(set(sizes))
    assert sizes[0] < sizes[1] < sizes[2]


def test_honeycomb_deterministic():
    a = generate_honeycomb_family(1, self_check=False)
    b = generate_honeycomb_family(1, self_check=False)
    assert a.positions == b.positions


def test_lemma2_dominated_is_farther(small_pool):
    for net in small_pool[:8]:
        know = build_knowledge(net)
        for v in net.ids:
            k = know[v]
            for u, u2 in itertools.permutations(k.neighbors, 2):
                if preceq(k, u, u2):
                    assert k.dist_to(u) > k.dist_to(u2)


def test_lemma3_duality(small_pool):
    for net in small_pool[:6]:
        know = build_knowledge(net)
        for v in net.ids:
            k = know[v]
            for u in k.neighbors:
                ku = know[u]
                for u2 in k.neighbors:
                    if u2 == u or u2 not in ku.nbr_dist:
                        continue
                    assert preceq(k, u, u2) == preceq(ku, v, u2)


def test_lemma4_maximal_duality(small_pool):
    for net in small_pool[:4]:
        know = build_knowledge(net)
        for v in net.ids:
            for u in net.neighbors(v):
                if u > v:
                    assert (is_maximal_neighbor(know[v], u)
                            == is_maximal_neighbor(know[u], v))


def test_lemma5_no_reverse_eclipse(small_pool):
    for net in small_pool[:6]:
        know = build_knowledge(net)
        for v in net.ids:
            k = know[v]
            for u, u2 in itertools.permutations(k.neighbors, 2):
                if preceq(k, u, u2):
                    ku2 = know[u2]
                    if u in ku2.nbr_dist and v in ku2.nbr_dist:
                        assert not preceq(ku2, u, v)


def test_node_knowledge_contains_no_coordinates(small_pool):
    k = node_knowledge(small_pool[0], small_pool[0].ids[0])
    assert not hasattr(k, "positions")
    for u, d in k.nbr_dist.items():
        assert isinstance(d, float)
