"""Desk-scale graph-rigidity oracle.

Planar global rigidity is decided by the classical characterization: a graph
is globally rigid iff it is complete on at most three vertices, or it is
3-connected and stays rigid after deleting any single edge.  Generic rigidity
is tested numerically: sample a random realization (generic with probability
one), build the rigidity matrix, and compare its rank with 2n - 3.  Two
independent samples must agree; a disagreement triggers a resample.

This module is a test instrument, not a production path: connectivity sweeps
are brute force and sized for n up to a couple hundred.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

RANK_TOL = 1e-8  # relative to the largest singular value


@dataclass(frozen=True)
class AbstractGraph:
    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        for u, v in self.edges:
            if not (0 <= u < v < self.n):
                raise ValueError(f"bad edge ({u}, {v}) for n={self.n}")

    @staticmethod
    def from_edges(n: int, edges) -> "AbstractGraph":
        return AbstractGraph(n, frozenset(
            (min(u, v), max(u, v)) for u, v in edges))

    def without_edge(self, e: tuple[int, int]) -> "AbstractGraph":
        return AbstractGraph(self.n, self.edges - {e})

    def is_complete(self) -> bool:
        return len(self.edges) == self.n * (self.n - 1) // 2

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def is_connected(self) -> bool:
        return _connected_after_removal(self.adjacency(), self.n, ())


def complete_graph(n: int) -> AbstractGraph:
    return AbstractGraph.from_edges(n, itertools.combinations(range(n), 2))


def cycle_graph(n: int) -> AbstractGraph:
    return AbstractGraph.from_edges(n, ((i, (i + 1) % n) for i in range(n)))


def wheel_graph(rims: int) -> AbstractGraph:
    """Hub 0 plus a cycle of `rims` rim vertices."""
    edges = [(0, i) for i in range(1, rims + 1)]
    edges += [(i, i % rims + 1) for i in range(1, rims + 1)]
    return AbstractGraph.from_edges(rims + 1, edges)


def _rigidity_rank(graph: AbstractGraph, coords: np.ndarray) -> int:
    rows = np.zeros((len(graph.edges), 2 * graph.n))
    for k, (u, v) in enumerate(sorted(graph.edges)):
        d = coords[u] - coords[v]
        rows[k, 2 * u:2 * u + 2] = d
        rows[k, 2 * v:2 * v + 2] = -d
    if not rows.size:
        return 0
    s = np.linalg.svd(rows, compute_uv=False)
    return int((s > RANK_TOL * s[0]).sum())


def is_rigid_generic(graph: AbstractGraph,
                     rng: np.random.Generator | None = None) -> bool:
    """Generic rigidity in the plane via the rigidity-matrix rank.

    Two random realizations are evaluated; on the (measure-zero) chance they
    disagree, fresh pairs are drawn until they agree.
    """
    if graph.n < 2:
        raise ValueError("rigidity needs n >= 2")
    if rng is None:
        rng = np.random.default_rng(0xA11CE)
    target = 2 * graph.n - 3
    for _ in range(8):
        v1 = _rigidity_rank(graph, rng.random((graph.n, 2))) == target
        v2 = _rigidity_rank(graph, rng.random((graph.n, 2))) == target
        if v1 == v2:
            return v1
    raise RuntimeError("rigidity verdicts keep disagreeing")


def is_redundantly_rigid(graph: AbstractGraph,
                         rng: np.random.Generator | None = None) -> bool:
    """Rigid, and still rigid after deleting any one edge."""
    if rng is None:
        rng = np.random.default_rng(0xA11CE)
    if not is_rigid_generic(graph, rng):
        return False
    return all(is_rigid_generic(graph.without_edge(e), rng)
               for e in sorted(graph.edges))


def _connected_after_removal(adj: list[list[int]], n: int,
                             removed: tuple[int, ...]) -> bool:
    alive = [v for v in range(n) if v not in removed]
    if not alive:
        return True
    seen = {alive[0]}
    stack = [alive[0]]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w not in removed and w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(alive)


def is_three_connected(graph: AbstractGraph) -> bool:
    """No pair of vertices disconnects the graph (brute-force sweep)."""
    if graph.n < 4:
        return False
    adj = graph.adjacency()
    if not _connected_after_removal(adj, graph.n, ()):
        return False
    return all(_connected_after_removal(adj, graph.n, pair)
               for pair in itertools.combinations(range(graph.n), 2))


def is_globally_rigid(graph: AbstractGraph,
                      rng: np.random.Generator | None = None) -> bool:
    """Complete on <= 3 vertices, or 3-connected and redundantly rigid."""
    if graph.n <= 3:
        return graph.is_complete()
    return is_three_connected(graph) and is_redundantly_rigid(graph, rng)


def induced_graph(network, nodes) -> AbstractGraph:
    """Induced subgraph of a Network on the given node ids, relabeled 0..k-1."""
    order = sorted(nodes)
    index = {v: i for i, v in enumerate(order)}
    edges = [(index[u], index[v]) for u in order
             for v in network.adjacency[u] if v in index and u < v]
    return AbstractGraph.from_edges(len(order), edges)


@dataclass
class RigidityReport:
    wheels_checked: int
    wheels_failed: list[int]
    unions_checked: int
    unions_failed: list[frozenset[int]]
    skeleton_checked: bool
    skeleton_rigid: bool | None
    failures: list[str]

    @property
    def ok(self) -> bool:
        return (not self.wheels_failed and not self.unions_failed
                and self.skeleton_rigid is not False)


def check_construction(result, network, skeleton_limit: int = 60) -> RigidityReport:
    """Machine-check the globally rigid structures a protocol run relied on.

    Verifies every constructed wheel, every W'' union recorded during
    wheel-construction requests, and (on small networks) the skeleton induced
    by the strongly interior and non-isolated weakly interior localized nodes.
    """
    from .network import NodeClass

    rng = np.random.default_rng(0xD15C)
    wheels_failed = []
    unions_failed = []
    failures = []
    wheels = [w for w in result.wheels.values() if w is not None]
    for w in wheels:
        g = induced_graph(network, w.nodes)
        if not is_globally_rigid(g, rng):
            wheels_failed.append(w.hub)
            failures.append(f"wheel of {w.hub} is not globally rigid")
    for nodes in result.construction_sets:
        g = induced_graph(network, nodes)
        if not is_globally_rigid(g, rng):
            unions_failed.append(nodes)
            failures.append(f"W'' union {sorted(nodes)} is not globally rigid")
    skeleton_checked = False
    skeleton_rigid = None
    if network.n <= skeleton_limit and not result.no_leader:
        core = {v for v in result.localized
                if result.classes[v] in (NodeClass.STRONG, NodeClass.WEAK)}
        if len(core) >= 4:
            skeleton_checked = True
            g = induced_graph(network, core)
            skeleton_rigid = is_globally_rigid(g, rng)
            if not skeleton_rigid:
                failures.append("localized core skeleton is not globally rigid")
    return RigidityReport(
        wheels_checked=len(wheels), wheels_failed=wheels_failed,
        unions_checked=len(result.construction_sets),
        unions_failed=unions_failed, skeleton_checked=skeleton_checked,
        skeleton_rigid=skeleton_rigid, failures=failures)
