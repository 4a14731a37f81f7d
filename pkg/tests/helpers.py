"""Independent test oracles, kept apart from the library code paths."""

import numpy as np

from commwheel.geometry import (
    coverage_interval,
    covers,
    distance,
    point_on_circle,
)
from commwheel.network import is_maximal_neighbor, node_knowledge


def wheel_exists_bruteforce(net, v) -> bool:
    """Exact wheel-existence test, independent of the chain construction.

    Build the digraph on maximal neighbors with an edge u -> u' whenever u'
    is adjacent to u and covers CCW(v, u); every directed cycle advances the
    frontier strictly counterclockwise, so a cycle exists iff some rim
    sequence wraps the whole circle, i.e. iff a communication wheel exists.
    """
    know = node_knowledge(net, v)
    nbrs = [u for u in know.neighbors if is_maximal_neighbor(know, u)]
    r = net.r
    pv = net.positions[v]
    edges = {}
    for u in nbrs:
        arc = coverage_interval(pv, net.positions[u], r)
        ccw_pt = point_on_circle(pv, r, arc.center + arc.half_width)
        edges[u] = [u2 for u2 in nbrs
                    if u2 != u and u2 in net.adjacency[u]
                    and covers(ccw_pt, net.positions[u2], r, 1e-9 * r)]
    color: dict[int, int] = {}

    def has_cycle_from(x: int) -> bool:
        color[x] = 1
        for y in edges[x]:
            if color.get(y) == 1:
                return True
            if color.get(y) is None and has_cycle_from(y):
                return True
        color[x] = 2
        return False

    return any(color.get(u) is None and has_cycle_from(u) for u in nbrs)


def arc_contained_by_sampling(net, v, u, u2, samples: int = 400) -> bool:
    """Set-inclusion of coverage arcs checked by dense sampling of u's arc."""
    r = net.r
    pv = net.positions[v]
    arc = coverage_interval(pv, net.positions[u], r)
    thetas = np.linspace(arc.center - arc.half_width + 1e-9,
                         arc.center + arc.half_width - 1e-9, samples)
    pu2 = net.positions[u2]
    return all(distance(point_on_circle(pv, r, t), pu2) <= r + 1e-7
               for t in thetas)
