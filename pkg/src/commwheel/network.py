"""Unit-disk-graph networks: construction, node classes, and generators.

A network is a set of planar nodes with one shared communication radius r;
two nodes are adjacent iff their distance is at most r.  Nodes only ever see
distances, never coordinates: the Knowledge objects built here hold exactly
the two-hop distance information that the distributed algorithms are allowed
to use.

Generators enforce general-position margins so every geometric predicate in
the pipeline is decided with a fat margin:
  * min pairwise distance >= MIN_DIST_MARGIN * r,
  * no pairwise distance within NEAR_R_MARGIN * r of r,
  * no near-collinear triple among nodes that can interact geometrically
    (pairwise distances <= 2r); far-apart collinear triples never enter any
    computation and cannot be avoided at realistic densities.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    AngularInterval,
    Point,
    arcs_cover_circle,
    coverage_interval,
    distance,
    triangle_height,
)

MIN_DIST_MARGIN = 1e-3      # times r, between any two nodes
NEAR_R_MARGIN = 1e-6        # times r, forbidden band around d == r
# Min triangle height among interacting triples, times r.  At realistic
# densities a margin of 1e-3*r admits no configurations at all (every fresh
# sample contains dozens of flatter triples), so generators enforce 1e-4*r,
# which keeps placement conditioning ~1e-12*r, far inside the 1e-9 bands.
HEIGHT_MARGIN = 1e-4
HEIGHT_GUARD = 1e-7         # times r, hard degeneracy guard in build_udg

ANGLE_TOL = 1e-9


class NetworkError(ValueError):
    """Invalid or degenerate network input."""


class GenerationError(RuntimeError):
    """A generator could not satisfy its margins or connectivity."""


class NodeClass(enum.Enum):
    BOUNDARY = "boundary"
    ISOLATED_WEAK = "isolated_weak"
    WEAK = "weak"
    STRONG = "strong"

    @property
    def is_interior(self) -> bool:
        return self is not NodeClass.BOUNDARY


@dataclass(frozen=True)
class Network:
    """Ground-truth network: positions plus derived unit-disk adjacency."""

    r: float
    positions: dict[int, Point]
    adjacency: dict[int, dict[int, float]]

    @property
    def ids(self) -> list[int]:
        return sorted(self.positions)

    @property
    def n(self) -> int:
        return len(self.positions)

    def neighbors(self, v: int) -> list[int]:
        return sorted(self.adjacency[v])

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency.values()) // 2

    def edges(self) -> list[tuple[int, int]]:
        return sorted((u, v) for u in self.adjacency
                      for v in self.adjacency[u] if u < v)


def _connected(adjacency: dict[int, dict[int, float]]) -> bool:
    ids = list(adjacency)
    if not ids:
        return False
    seen = {ids[0]}
    stack = [ids[0]]
    while stack:
        u = stack.pop()
        for w in adjacency[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(ids)


def _flat_local_triples(coords: np.ndarray, r: float,
                        height_margin: float) -> list[tuple[int, int, int]]:
    """Triples with pairwise distances <= 2r flatter than the margin.

    Only such triples can enter a geometric computation (all reference
    triangles consist of neighbors of a common node).  Height of a triangle
    is |cross| / longest side; vectorized per apex node.
    """
    n = len(coords)
    diff = coords[:, None, :] - coords[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    within = dist <= 2.0 * r
    threshold = height_margin * r
    flat_triples = []
    for a in range(n):
        cand = np.nonzero(within[a] & (np.arange(n) > a))[0]
        if len(cand) < 2:
            continue
        rel = coords[cand] - coords[a]
        # cross[i, j] = rel_i x rel_j
        cross = rel[:, 0][:, None] * rel[:, 1][None, :] - \
            rel[:, 1][:, None] * rel[:, 0][None, :]
        side = np.maximum(np.maximum(dist[a, cand][:, None],
                                     dist[a, cand][None, :]),
                          dist[np.ix_(cand, cand)])
        pairs_ok = within[np.ix_(cand, cand)]
        ii, jj = np.nonzero(np.triu(pairs_ok, 1))
        if len(ii) == 0:
            continue
        flat = np.abs(cross[ii, jj]) < threshold * side[ii, jj]
        for k in np.nonzero(flat)[0]:
            flat_triples.append((a, int(cand[ii[k]]), int(cand[jj[k]])))
    return flat_triples


def build_udg(positions, r: float) -> Network:
    """Build the unit disk graph over the given positions.

    positions may be a dict id -> Point or a sequence of Points (ids are then
    0..n-1).  Rejects disconnected graphs, distances in the forbidden band
    around r, and degenerate (near-collinear) interacting triples.
    """
    if r <= 0.0:
        raise NetworkError("communication range must be positive")
    if isinstance(positions, dict):
        pos = {int(i): p for i, p in positions.items()}
    else:
        pos = {i: p for i, p in enumerate(positions)}
    ids = sorted(pos)
    if len(ids) < 2:
        raise NetworkError("need at least two nodes")
    coords = np.array([[pos[i].x, pos[i].y] for i in ids], dtype=float)
    if not np.isfinite(coords).all():
        raise NetworkError("non-finite coordinate")
    diff = coords[:, None, :] - coords[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    iu, ju = np.triu_indices(len(ids), 1)
    pair_d = dist[iu, ju]
    if (pair_d <= 0.0).any():
        raise NetworkError("coincident nodes")
    near_r = np.abs(pair_d - r) < NEAR_R_MARGIN * r
    if near_r.any():
        k = int(np.nonzero(near_r)[0][0])
        raise NetworkError(
            f"distance between nodes {ids[iu[k]]} and {ids[ju[k]]} is within "
            f"{NEAR_R_MARGIN}*r of r (generation degeneracy)")
    flat = _flat_local_triples(coords, r, HEIGHT_GUARD)
    if flat:
        a, b, c = flat[0]
        raise NetworkError(
            f"near-collinear triple among nodes ({ids[a]}, {ids[b]}, {ids[c]})")
    adjacency: dict[int, dict[int, float]] = {i: {} for i in ids}
    for k in np.nonzero(pair_d <= r)[0]:
        a, b = ids[int(iu[k])], ids[int(ju[k])]
        d = float(pair_d[k])
        adjacency[a][b] = d
        adjacency[b][a] = d
    if not _connected(adjacency):
        raise NetworkError("unit disk graph is not connected")
    return Network(r=float(r), positions=pos, adjacency=adjacency)


@dataclass(frozen=True)
class NodeKnowledge:
    """What one node legitimately knows: its 2-hop neighbor lists + distances.

    Contains no coordinates.  two_hop[u][w] = d(u, w) for u a neighbor of the
    owner and w a neighbor of u.
    """

    owner: int
    r: float
    nbr_dist: dict[int, float]
    two_hop: dict[int, dict[int, float]]

    @property
    def neighbors(self) -> list[int]:
        return sorted(self.nbr_dist)

    def dist_to(self, u: int) -> float:
        return self.nbr_dist[u]

    def are_adjacent(self, u: int, w: int) -> bool:
        """Adjacency between two nodes visible from the owner's 2-hop data."""
        if u == self.owner:
            return w in self.nbr_dist
        if w == self.owner:
            return u in self.nbr_dist
        if u in self.two_hop:
            return w in self.two_hop[u]
        if w in self.two_hop:
            return u in self.two_hop[w]
        raise KeyError(f"node {self.owner} cannot see pair ({u}, {w})")

    def dist_between(self, u: int, w: int) -> float:
        if u == self.owner:
            return self.nbr_dist[w]
        if w == self.owner:
            return self.nbr_dist[u]
        if u in self.two_hop and w in self.two_hop[u]:
            return self.two_hop[u][w]
        if w in self.two_hop and u in self.two_hop[w]:
            return self.two_hop[w][u]
        raise KeyError(f"node {self.owner} does not know d({u}, {w})")

    def common_neighbors(self, u: int) -> list[int]:
        """Common neighbors of the owner and its neighbor u."""
        return sorted(w for w in self.two_hop[u] if w in self.nbr_dist)


def node_knowledge(network: Network, v: int) -> NodeKnowledge:
    """What node v learns from the initial neighbor-list exchange."""
    nbrs = network.adjacency[v]
    return NodeKnowledge(
        owner=v,
        r=network.r,
        nbr_dist=dict(nbrs),
        two_hop={u: dict(network.adjacency[u]) for u in nbrs},
    )


def build_knowledge(network: Network) -> dict[int, NodeKnowledge]:
    """Materialize the initial neighbor-list exchange for every node."""
    return {v: node_knowledge(network, v) for v in network.ids}


def _half_width(d: float, r: float) -> float:
    return math.acos(min(1.0, d / (2.0 * r)))


def preceq(knowledge: NodeKnowledge, u: int, u_prime: int) -> bool:
    """Eclipse order at the owner v: does u_prime's arc contain u's arc?

    Computed purely from d(v,u), d(v,u'), d(u,u').  Non-adjacent u, u' can
    never nest (their arcs would force d(u,u') <= r), so the answer is False
    whenever the distance between them is unknown.
    """
    if u == u_prime:
        return True
    r = knowledge.r
    dv_u = knowledge.dist_to(u)
    dv_up = knowledge.dist_to(u_prime)
    if not knowledge.are_adjacent(u, u_prime):
        return False
    duu = knowledge.dist_between(u, u_prime)
    # Angle between the two neighbors as seen from v (law of cosines).
    cos_gamma = (dv_u * dv_u + dv_up * dv_up - duu * duu) / (2.0 * dv_u * dv_up)
    gamma = math.acos(max(-1.0, min(1.0, cos_gamma)))
    return gamma + _half_width(dv_u, r) <= _half_width(dv_up, r) + ANGLE_TOL


def is_maximal_neighbor(knowledge: NodeKnowledge, u: int) -> bool:
    """True iff no other neighbor of the owner eclipses u."""
    return not any(u2 != u and preceq(knowledge, u, u2)
                   for u2 in knowledge.nbr_dist)


def interior_oracle(network: Network, v: int) -> bool:
    """Ground-truth interior test: neighbors' arcs cover v's whole circle."""
    pos_v = network.positions[v]
    arcs = [coverage_interval(pos_v, network.positions[u], network.r)
            for u in network.adjacency[v]]
    return arcs_cover_circle(arcs, tol=ANGLE_TOL)


def coverage_arcs(network: Network, v: int) -> list[AngularInterval]:
    """Neighbor coverage arcs of v's circle, for verification code."""
    pos_v = network.positions[v]
    return [coverage_interval(pos_v, network.positions[u], network.r)
            for u in sorted(network.adjacency[v])]


def classify_all(network: Network,
                 interior: dict[int, bool] | None = None) -> dict[int, NodeClass]:
    """Four-way partition of the nodes.

    interior maps node -> interior verdict; by default it is produced by the
    distributed wheel construction (the oracle is reserved for verification).
    """
    if interior is None:
        from .wheel import construct_communication_wheel
        knowledge = build_knowledge(network)
        interior = {v: construct_communication_wheel(knowledge[v]) is not None
                    for v in network.ids}
    classes: dict[int, NodeClass] = {}
    for v in network.ids:
        if not interior[v]:
            classes[v] = NodeClass.BOUNDARY
    for v in network.ids:
        if v in classes:
            continue
        nbr_interior = [interior[u] for u in network.adjacency[v]]
        if all(nbr_interior):
            classes[v] = NodeClass.STRONG
    for v in network.ids:
        if v in classes:
            continue
        if any(classes.get(u) is NodeClass.STRONG
               for u in network.adjacency[v]):
            classes[v] = NodeClass.WEAK
        else:
            classes[v] = NodeClass.ISOLATED_WEAK
    return classes


def strong_interior(classes: dict[int, NodeClass]) -> set[int]:
    return {v for v, c in classes.items() if c is NodeClass.STRONG}


def strong_interior_connected(network: Network,
                              classes: dict[int, NodeClass]) -> bool:
    """Connectivity of the subgraph induced by strongly interior nodes."""
    strong = strong_interior(classes)
    if not strong:
        return False
    start = next(iter(sorted(strong)))
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for w in network.adjacency[u]:
            if w in strong and w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(strong)


def _repair_margins(coords: np.ndarray, r: float, rng: np.random.Generator,
                    width: float, height: float, height_margin: float,
                    jitter: float | None = None,
                    base: np.ndarray | None = None,
                    max_sweeps: int = 200) -> bool:
    """Resample offending nodes until all generation margins hold.

    One node per violating pair/triple is moved (the highest index), so each
    sweep removes structures faster than fresh samples create new ones.  With
    jitter/base set, a node is resampled as base + uniform-disk jitter
    (lattice mode); otherwise uniformly in the region.
    """
    for _ in range(max_sweeps):
        diff = coords[:, None, :] - coords[None, :, :]
        dist = np.hypot(diff[..., 0], diff[..., 1])
        np.fill_diagonal(dist, np.inf)
        bad: set[int] = set()
        iu, ju = np.triu_indices(len(coords), 1)
        pair_d = dist[iu, ju]
        for k in np.nonzero(pair_d < MIN_DIST_MARGIN * r)[0]:
            bad.add(int(ju[k]))
        for k in np.nonzero(np.abs(pair_d - r) < NEAR_R_MARGIN * r)[0]:
            bad.add(int(ju[k]))
        for triple in _flat_local_triples(coords, r, height_margin):
            bad.add(max(triple))
        if not bad:
            return True
        for i in sorted(bad):
            if jitter is not None:
                ang = rng.uniform(0.0, 2.0 * math.pi)
                rad = jitter * math.sqrt(rng.uniform())
                coords[i] = base[i] + [rad * math.cos(ang), rad * math.sin(ang)]
            else:
                coords[i] = rng.uniform((0.0, 0.0), (width, height))
    return False


def generate_random(n: int, width: float, height: float, r: float,
                    seed: int, max_attempts: int = 200) -> Network:
    """Uniform random connected UDG with all general-position margins.

    Deterministic in seed.  Raises GenerationError when the density is too
    low to reach connectivity within the attempt budget.
    """
    if n < 4:
        raise GenerationError("need at least 4 nodes")
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        coords = rng.uniform((0.0, 0.0), (width, height), size=(n, 2))
        if not _repair_margins(coords, r, rng, width, height, HEIGHT_MARGIN):
            continue
        diff = coords[:, None, :] - coords[None, :, :]
        dist = np.hypot(diff[..., 0], diff[..., 1])
        adjacency = {i: {} for i in range(n)}
        for i, j in zip(*np.nonzero(np.triu(dist <= r, 1))):
            adjacency[int(i)][int(j)] = float(dist[i, j])
            adjacency[int(j)][int(i)] = float(dist[i, j])
        if not _connected(adjacency):
            continue
        return build_udg([Point(float(x), float(y)) for x, y in coords], r)
    raise GenerationError(
        f"could not generate a connected network with margins after "
        f"{max_attempts} attempts (density too low?)")


_HONEYCOMB_SPACING = 0.8    # lattice spacing, times r
_HONEYCOMB_JITTER = 0.02    # jitter radius, times spacing
_HONEYCOMB_SEED = 0x57EE1


def honeycomb_ring_count(k: int) -> int:
    """Lattice radius used for family member k (k repeated cells)."""
    return k + 1


def generate_honeycomb_family(k: int, r: float = 1.0,
                              self_check: bool = True) -> Network:
    """Family of networks on which trilateration stalls at its seed triangle.

    Member k is a hexagonal patch of a jittered triangular lattice with
    spacing 0.8*r: adjacent lattice points are in range, second neighbors
    (sqrt(3) times the spacing) are not, so the graph contains triangles but
    no K4 - no fourth node is ever adjacent to all of a seeded triangle.
    Interior nodes keep full hexagonal neighborhoods, which the wheel
    construction turns into 6-rim wheels, and the protocol localizes every
    node.  Construction is deterministic in k and property-checked.
    """
    if k < 1:
        raise GenerationError("k must be >= 1")
    rings = honeycomb_ring_count(k)
    a = _HONEYCOMB_SPACING * r
    base = []
    for q in range(-rings, rings + 1):
        for s in range(-rings, rings + 1):
            if abs(q + s) > rings:
                continue
            base.append((a * (q + 0.5 * s), a * (math.sqrt(3.0) / 2.0) * s))
    base = np.array(sorted(base), dtype=float)
    rng = np.random.default_rng(_HONEYCOMB_SEED + k)
    jitter = _HONEYCOMB_JITTER * a
    ang = rng.uniform(0.0, 2.0 * math.pi, size=len(base))
    rad = jitter * np.sqrt(rng.uniform(size=len(base)))
    coords = base + np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1)
    if not _repair_margins(coords, r, rng, 0.0, 0.0, HEIGHT_MARGIN,
                           jitter=jitter, base=base):
        raise GenerationError("honeycomb margin repair did not converge")
    network = build_udg([Point(float(x), float(y)) for x, y in coords], r)
    if self_check:
        _honeycomb_self_check(network)
    return network


def _honeycomb_self_check(network: Network) -> None:
    """Verify the three properties that define the family."""
    from .protocol import run_simulation
    from .trilateration import sweep_all_triangles

    classes = classify_all(network)
    if not strong_interior(classes):
        raise GenerationError("honeycomb self-check: empty strong interior")
    if not strong_interior_connected(network, classes):
        raise GenerationError(
            "honeycomb self-check: strong interior disconnected")
    stats = sweep_all_triangles(network)
    if stats.triangle_count == 0 or stats.best != 3 or stats.worst != 3:
        raise GenerationError(
            f"honeycomb self-check: trilateration best={stats.best} "
            f"worst={stats.worst} over {stats.triangle_count} triangles")
    result = run_simulation(network, seed=0)
    if len(result.localized) != network.n:
        raise GenerationError(
            f"honeycomb self-check: wheel protocol localized only "
            f"{len(result.localized)}/{network.n} nodes")
