"""Distributed communication-wheel construction and verification.

A node decides interior/boundary purely from its 2-hop distance knowledge by
trying to build a communication wheel: a cycle of maximal neighbors whose
zones chain-cover the node's circle.  The construction works in the node's
local coordinate frame (itself at the origin, first rim on the positive
x-axis, second rim with positive y), which also fixes what "counterclockwise"
means for that node; the frame's handedness relative to ground truth is
chosen by the data and may be a reflection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import (
    ORIGIN,
    REL_TOL,
    Point,
    arcs_cover_circle,
    boundary_intersections,
    coverage_interval,
    covers,
    distance,
    locate_by_three_distances,
    locate_by_two_distances,
    point_on_circle,
    polar_angle,
)
from .network import (
    Network,
    NodeKnowledge,
    is_maximal_neighbor,
    node_knowledge,
    preceq,
)


class WheelConstructionFault(AssertionError):
    """A 'cannot happen' branch was hit; indicates a geometry-tolerance bug."""


@dataclass(frozen=True)
class Wheel:
    """Hub plus cyclically ordered rim, with hub-local coordinates."""

    hub: int
    rim: tuple[int, ...]
    local_pos: dict[int, Point]

    @property
    def size(self) -> int:
        return len(self.rim)

    def rim_after(self, v: int) -> int:
        """Next rim node counterclockwise from v (in the hub's local frame)."""
        i = self.rim.index(v)
        return self.rim[(i + 1) % len(self.rim)]

    def rim_before(self, v: int) -> int:
        i = self.rim.index(v)
        return self.rim[(i - 1) % len(self.rim)]

    @property
    def nodes(self) -> set[int]:
        return {self.hub, *self.rim}


def _half_width(d: float, r: float) -> float:
    return math.acos(min(1.0, d / (2.0 * r)))


def _ccw_point(center: Point, pos: Point, d: float, r: float) -> Point:
    """CCW(v, u) for u placed at pos, in the local frame's orientation."""
    return point_on_circle(center, r,
                           polar_angle(center, pos) + _half_width(d, r))


def next_rim(knowledge: NodeKnowledge, w_prev: int, w_prev2: int,
             placed: dict[int, Point]) -> tuple[int, Point] | None:
    """Find the next rim node after (w_prev2, w_prev), with its local position.

    Scans common neighbors u of the hub and w_prev for the closest one that
    covers CCW(v, w_prev) while its own CCW(v, u) escapes w_prev's zone.
    Candidates adjacent to w_prev2 are placed uniquely by three distances;
    the rest get two mirror candidates of which at most one can cover the
    frontier (both covering is the impossible case of the construction's
    correctness argument, asserted here).

    Already-placed rim nodes are not candidates: while the chain is open
    their arcs lie strictly behind the frontier, but the mirror image of a
    placed node can spuriously cover it.
    """
    r = knowledge.r
    tol = REL_TOL * r
    p_prev = placed[w_prev]
    p_prev2 = placed[w_prev2]
    d_prev = knowledge.dist_to(w_prev)
    frontier = _ccw_point(ORIGIN, p_prev, d_prev, r)
    best_key = None
    best = None
    for u in knowledge.common_neighbors(w_prev):
        if u in placed:
            continue
        du = knowledge.dist_to(u)
        if best_key is not None and (du, u) >= best_key:
            continue
        duw = knowledge.dist_between(u, w_prev)
        if knowledge.are_adjacent(u, w_prev2):
            pos = locate_by_three_distances(
                (ORIGIN, p_prev, p_prev2),
                (du, duw, knowledge.dist_between(u, w_prev2)))
            if not covers(pos, frontier, r, tol):
                continue
        else:
            mirror_a, mirror_b = locate_by_two_distances(ORIGIN, p_prev,
                                                         du, duw)
            cov_a = covers(mirror_a, frontier, r, tol)
            cov_b = covers(mirror_b, frontier, r, tol)
            if cov_a and cov_b:
                raise WheelConstructionFault(
                    f"both mirror positions of {u} cover the frontier")
            if not (cov_a or cov_b):
                continue
            pos = mirror_a if cov_a else mirror_b
        if covers(_ccw_point(ORIGIN, pos, du, r), p_prev, r, tol):
            continue
        best_key = (du, u)
        best = (u, pos)
    return best


def _select_w1(knowledge: NodeKnowledge, w0: int, w0_pos: Point,
               int_ccw: Point, int_cw: Point) -> tuple[int, Point] | None:
    """Closest common neighbor of v and w0 covering a boundary intersection.

    The chosen node is placed with positive y, which is exactly how the local
    frame's orientation gets pinned: the intersection it covers becomes
    CCW(v, w0) by definition.
    """
    r = knowledge.r
    tol = REL_TOL * r
    best_key = None
    best = None
    for u in knowledge.common_neighbors(w0):
        du = knowledge.dist_to(u)
        if best_key is not None and (du, u) >= best_key:
            continue
        pos = locate_by_two_distances(ORIGIN, w0_pos, du,
                                      knowledge.dist_between(u, w0))[0]
        cov_ccw = covers(pos, int_ccw, r, tol)
        cov_cw = covers(pos, int_cw, r, tol)
        if not (cov_ccw or cov_cw):
            continue
        if cov_ccw and cov_cw:
            # Both endpoints of w0's arc inside u's arc would nest the arcs,
            # contradicting the closest neighbor being maximal.
            raise WheelConstructionFault(
                f"candidate {u} covers both intersections with w0={w0}")
        if not cov_ccw:
            # A positive-y node covering only the negative-y intersection is
            # geometrically impossible for arcs of half-width < pi/2.
            raise WheelConstructionFault(
                f"candidate {u} covers only the CW intersection")
        if preceq(knowledge, u, w0):
            continue
        best_key = (du, u)
        best = (u, pos)
    return best


def construct_communication_wheel(knowledge: NodeKnowledge) -> Wheel | None:
    """Run the per-node wheel construction; None means a boundary verdict.

    Follows the distributed procedure exactly: seed with the closest
    neighbor, orient the frame with the first covering common neighbor, then
    chain rim nodes counterclockwise until one covers CW(v, w0).
    """
    nbrs = knowledge.neighbors
    if not nbrs:
        raise ValueError(f"node {knowledge.owner} has no neighbors")
    r = knowledge.r
    tol = REL_TOL * r
    w0 = min(nbrs, key=lambda u: (knowledge.dist_to(u), u))
    d0 = knowledge.dist_to(w0)
    w0_pos = Point(d0, 0.0)
    int_ccw, int_cw = boundary_intersections(ORIGIN, w0_pos, r)
    first = _select_w1(knowledge, w0, w0_pos, int_ccw, int_cw)
    if first is None:
        return None
    w1, w1_pos = first
    rim = [w0, w1]
    placed = {w0: w0_pos, w1: w1_pos}
    while True:
        cand = next_rim(knowledge, rim[-1], rim[-2], placed)
        if cand is None:
            return None
        u, pos = cand
        if u == knowledge.owner or u in placed:
            raise WheelConstructionFault(
                f"rim node {u} repeated at hub {knowledge.owner}")
        rim.append(u)
        placed[u] = pos
        if covers(pos, int_cw, r, tol):
            break
        if len(rim) > len(nbrs):
            raise WheelConstructionFault(
                f"rim exceeded degree bound at hub {knowledge.owner}")
    local_pos = {knowledge.owner: ORIGIN}
    local_pos.update(placed)
    return Wheel(hub=knowledge.owner, rim=tuple(rim), local_pos=local_pos)


def verify_wheel_report(wheel: Wheel, network: Network) -> list[str]:
    """All wheel-invariant violations against ground truth (empty = valid)."""
    problems = []
    hub = wheel.hub
    rim = wheel.rim
    r = network.r
    tol = REL_TOL * r
    m = len(rim)
    if m < 3:
        problems.append(f"rim has {m} < 3 nodes")
    if len(set(rim)) != m or hub in rim:
        problems.append("rim nodes not distinct from each other and the hub")
        return problems
    adj = network.adjacency
    for u in rim:
        if u not in adj[hub]:
            problems.append(f"rim node {u} is not adjacent to hub {hub}")
    if problems:
        return problems
    knowledge = node_knowledge(network, hub)
    for u in rim:
        if not is_maximal_neighbor(knowledge, u):
            problems.append(f"rim node {u} is not a maximal neighbor of {hub}")
    for i in range(m):
        a, b = rim[i], rim[(i + 1) % m]
        if b not in adj[a]:
            problems.append(f"consecutive rim nodes {a}, {b} not adjacent")
    # Local frame must reproduce the measured distances.
    missing = [u for u in (hub, *rim) if u not in wheel.local_pos]
    if missing:
        problems.append(f"local positions missing for {missing}")
        return problems
    hub_pos = wheel.local_pos[hub]
    for u in rim:
        if abs(distance(hub_pos, wheel.local_pos[u]) - adj[hub][u]) > 1e-9 * r:
            problems.append(f"spoke {hub}-{u} length off in local frame")
    for i in range(m):
        a, b = rim[i], rim[(i + 1) % m]
        if b not in adj[a]:
            continue
        local_d = distance(wheel.local_pos[a], wheel.local_pos[b])
        if abs(local_d - adj[a][b]) > 1e-9 * r:
            problems.append(f"rim edge {a}-{b} length off in local frame")
    # Chain-coverage clause, evaluated in the local frame's own orientation.
    for i in range(m):
        u = rim[i]
        succ = rim[(i + 1) % m]
        pred = rim[(i - 1) % m]
        d_u = adj[hub][u]
        phi = polar_angle(hub_pos, wheel.local_pos[u])
        hw = _half_width(d_u, r)
        ccw_pt = point_on_circle(hub_pos, r, phi + hw)
        cw_pt = point_on_circle(hub_pos, r, phi - hw)
        if not covers(ccw_pt, wheel.local_pos[succ], r, tol):
            problems.append(f"CCW({hub},{u}) not covered by successor {succ}")
        if not covers(cw_pt, wheel.local_pos[pred], r, tol):
            problems.append(f"CW({hub},{u}) not covered by predecessor {pred}")
    # Full-circle coverage by rim zones, from true distances.
    hub_true = network.positions[hub]
    arcs = [coverage_interval(hub_true, network.positions[u], r) for u in rim]
    if not arcs_cover_circle(arcs):
        problems.append("rim zones do not cover the hub's circle")
    return problems


def verify_wheel(wheel: Wheel, network: Network) -> bool:
    """True iff the wheel satisfies every invariant against ground truth."""
    return not verify_wheel_report(wheel, network)


def construct_all_wheels(knowledge: dict[int, NodeKnowledge]
                         ) -> dict[int, Wheel | None]:
    """Per-node verdicts for a whole network (None = boundary)."""
    return {v: construct_communication_wheel(k)
            for v, k in sorted(knowledge.items())}
