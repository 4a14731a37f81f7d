"""Sequential trilateration baseline.

Fix a seed triangle of mutually adjacent nodes in its own frame, then
repeatedly localize any node with at least three localized neighbors until
nothing changes.  The localized set is order-independent, so plain sweeps in
ascending id order reach the unique fixed point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    ORIGIN,
    DegenerateGeometryError,
    Point,
    locate_by_three_distances,
    locate_by_two_distances,
)
from .network import Network, NetworkError


@dataclass
class TrilaterationRun:
    triangle: tuple[int, int, int]
    positions: dict[int, Point]
    sweeps: int

    @property
    def localized(self) -> set[int]:
        return set(self.positions)

    @property
    def count(self) -> int:
        return len(self.positions)


def trilaterate_from(network: Network,
                     triangle: tuple[int, int, int]) -> TrilaterationRun:
    """Run sequential trilateration from one seed triangle.

    The triangle is pinned in its own frame: first vertex at the origin,
    second on the positive x-axis, third with positive y.
    """
    a, b, c = triangle
    adj = network.adjacency
    if len({a, b, c}) != 3 or b not in adj[a] or c not in adj[a] or c not in adj[b]:
        raise NetworkError(f"seed triangle {triangle} is not mutually adjacent")
    positions = {a: ORIGIN, b: Point(adj[a][b], 0.0)}
    try:
        positions[c] = locate_by_two_distances(positions[a], positions[b],
                                               adj[a][c], adj[b][c])[0]
    except DegenerateGeometryError as e:
        raise NetworkError(f"degenerate seed triangle {triangle}: {e}") from e
    sweeps = 0
    changed = True
    while changed:
        changed = False
        sweeps += 1
        for v in network.ids:
            if v in positions:
                continue
            known = [u for u in sorted(adj[v]) if u in positions]
            if len(known) < 3:
                continue
            pos = None
            for combo in itertools.islice(itertools.combinations(known, 3), 20):
                try:
                    pos = locate_by_three_distances(
                        tuple(positions[u] for u in combo),
                        tuple(adj[v][u] for u in combo))
                    break
                except DegenerateGeometryError:
                    continue
            if pos is not None:
                positions[v] = pos
                changed = True
    return TrilaterationRun(triangle=tuple(triangle), positions=positions,
                            sweeps=sweeps)


def enumerate_triangles(network: Network) -> list[tuple[int, int, int]]:
    """All mutually adjacent triples (a < b < c)."""
    adj = network.adjacency
    triangles = []
    for a in network.ids:
        na = [u for u in adj[a] if u > a]
        for b in sorted(na):
            common = set(na) & set(adj[b])
            triangles.extend((a, b, c) for c in sorted(common) if c > b)
    return triangles


@dataclass
class SweepStats:
    triangle_count: int
    sampled: bool
    counts: dict[tuple[int, int, int], int] = field(default_factory=dict)

    @property
    def best(self) -> int | None:
        return max(self.counts.values()) if self.counts else None

    @property
    def worst(self) -> int | None:
        return min(self.counts.values()) if self.counts else None

    def histogram(self) -> dict[int, int]:
        hist: dict[int, int] = {}
        for c in self.counts.values():
            hist[c] = hist.get(c, 0) + 1
        return dict(sorted(hist.items()))

    def best_triangle(self) -> tuple[int, int, int] | None:
        if not self.counts:
            return None
        return max(self.counts, key=lambda t: (self.counts[t], [-x for x in t]))


def sweep_all_triangles(network: Network, limit: int = 100_000,
                        seed: int = 0) -> SweepStats:
    """Trilaterate from every seed triangle and aggregate localized counts.

    Exhaustive up to `limit` triangles; beyond that a seeded uniform sample
    of `limit` seeds is used instead.
    """
    triangles = enumerate_triangles(network)
    sampled = len(triangles) > limit
    if sampled:
        rng = np.random.default_rng(seed)
        idx = rng.choice(len(triangles), size=limit, replace=False)
        chosen = [triangles[i] for i in sorted(idx)]
    else:
        chosen = triangles
    stats = SweepStats(triangle_count=len(triangles), sampled=sampled)
    for tri in chosen:
        stats.counts[tri] = trilaterate_from(network, tri).count
    return stats
