"""Anchor-free localization of unit-disk sensor networks via communication wheels."""

from .geometry import (
    AngularInterval,
    DegenerateGeometryError,
    Isometry,
    Point,
    boundary_intersections,
    coverage_interval,
    covers,
    distance,
    fit_isometry,
    locate_by_three_distances,
    locate_by_two_distances,
)
from .network import (
    GenerationError,
    Network,
    NetworkError,
    NodeClass,
    NodeKnowledge,
    build_knowledge,
    build_udg,
    classify_all,
    generate_honeycomb_family,
    generate_random,
    interior_oracle,
    is_maximal_neighbor,
    preceq,
    strong_interior_connected,
)
from .wheel import Wheel, construct_communication_wheel, next_rim, verify_wheel

__all__ = [
    "AngularInterval",
    "DegenerateGeometryError",
    "GenerationError",
    "Isometry",
    "Network",
    "NetworkError",
    "NodeClass",
    "NodeKnowledge",
    "Point",
    "Wheel",
    "boundary_intersections",
    "build_knowledge",
    "build_udg",
    "classify_all",
    "construct_communication_wheel",
    "coverage_interval",
    "covers",
    "distance",
    "fit_isometry",
    "generate_honeycomb_family",
    "generate_random",
    "interior_oracle",
    "is_maximal_neighbor",
    "locate_by_three_distances",
    "locate_by_two_distances",
    "next_rim",
    "preceq",
    "strong_interior_connected",
    "verify_wheel",
]
