"""Deterministic simulator of the distributed localization protocol.

Stages: every node builds its wheel from 2-hop knowledge (wheel module), the
strongly interior nodes elect a min-id leader by flooding, then positions
propagate from the leader through the five message types.  The leader's own
wheel frame becomes the global frame.

Handlers only ever read the node's own state and the incoming message; ground
truth never enters the message plane.  Delivery is a single global FIFO by
default, which keeps per-link FIFO and makes traces replayable; a seeded
random interleaving (still per-link FIFO) exists to test that the final
localized set does not depend on message order.
"""

from __future__ import annotations

import hashlib
import itertools
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    IDENTITY,
    ORIGIN,
    DegenerateGeometryError,
    Isometry,
    Point,
    distance,
    fit_isometry,
    locate_by_three_distances,
)
from .network import (
    Network,
    NodeClass,
    NodeKnowledge,
    build_knowledge,
    classify_all,
    strong_interior,
    strong_interior_connected,
)
from .wheel import Wheel, construct_communication_wheel

POSITION_TOL = 1e-6  # times r: contradiction threshold for repeated positions


class NoLeaderError(RuntimeError):
    """Strong interior empty or disconnected: the protocol cannot start."""


@dataclass(frozen=True)
class IAmAt:
    sender: int
    pos: tuple[float, float]


@dataclass(frozen=True)
class YouAreAt:
    sender: int
    target: int
    pos: tuple[float, float]


@dataclass(frozen=True)
class ConstructWheel:
    """Leader variant (type 3): positions are global-frame."""

    sender: int
    sender_pos: tuple[float, float]
    next_rim: int
    next_rim_pos: tuple[float, float]


@dataclass(frozen=True)
class ConstructWheelFind:
    """Type 4: positions are in the requester's local frame."""

    sender: int
    sender_pos: tuple[float, float]
    recipient_pos: tuple[float, float]
    next_rim: int
    next_rim_pos: tuple[float, float]
    target: int


@dataclass(frozen=True)
class FoundAt:
    """Type 5 reply: target's position in the requester's local frame."""

    sender: int
    target: int
    pos: tuple[float, float]


@dataclass(frozen=True)
class LeaderElection:
    candidate: int


_KIND = {
    IAmAt: "i_am_at",
    YouAreAt: "you_are_at",
    ConstructWheel: "construct_wheel",
    ConstructWheelFind: "construct_wheel_find",
    FoundAt: "found_at",
    LeaderElection: "leader_election",
}


@dataclass
class NodeState:
    """Everything one node knows during the run; never sees ground truth."""

    id: int
    knowledge: NodeKnowledge
    node_class: NodeClass
    wheel: Wheel | None
    is_leader: bool = False
    pos: Point | None = None
    iamat: dict[int, Point] = field(default_factory=dict)
    placed: dict[int, Point] = field(default_factory=dict)
    to_global: Isometry | None = None
    ln_phase: int = 0          # 0 idle, 1 placing/awaiting, 2 done
    pending: dict[int, int] = field(default_factory=dict)  # target -> rim asked
    faults: list[str] = field(default_factory=list)

    @property
    def localized(self) -> bool:
        return self.pos is not None


@dataclass
class SimTrace:
    entries: list[tuple[int, int, int, str, str]] = field(default_factory=list)
    counters: dict[str, int] = field(default_factory=dict)
    rounds: int = 0

    def log(self, step: int, sender: int, receiver: int, msg) -> None:
        kind = _KIND[type(msg)]
        digest = hashlib.sha256(repr(msg).encode()).hexdigest()[:12]
        self.entries.append((step, sender, receiver, kind, digest))

    def count(self, msg) -> None:
        kind = _KIND[type(msg)]
        self.counters[kind] = self.counters.get(kind, 0) + 1

    @property
    def hash(self) -> str:
        h = hashlib.sha256()
        for e in self.entries:
            h.update(("|".join(map(str, e)) + "\n").encode())
        return h.hexdigest()


@dataclass
class LocalizationResult:
    network_n: int
    r: float
    classes: dict[int, NodeClass]
    leader: int | None
    no_leader: bool
    positions: dict[int, Point | None]
    trace: SimTrace
    events: int
    wheels: dict[int, Wheel | None]
    construction_sets: list[frozenset[int]]
    faults: list[str]

    @property
    def localized(self) -> set[int]:
        return {v for v, p in self.positions.items() if p is not None}

    @property
    def message_counts(self) -> dict[str, int]:
        return dict(self.trace.counters)

    @property
    def trace_hash(self) -> str:
        return self.trace.hash


def elect_leader(network: Network, classes: dict[int, NodeClass],
                 trace: SimTrace | None = None) -> int:
    """Min-id flooding over the strong interior; returns the elected id.

    Every strongly interior node floods its best-known candidate to its
    strongly interior neighbors, forwarding only improvements.
    """
    strong = strong_interior(classes)
    if not strong:
        raise NoLeaderError("strong interior is empty")
    if not strong_interior_connected(network, classes):
        raise NoLeaderError("strong interior is disconnected")
    trace = trace if trace is not None else SimTrace()
    best = {v: v for v in strong}
    queue: deque[tuple[int, int, LeaderElection]] = deque()
    for v in sorted(strong):
        msg = LeaderElection(v)
        for u in network.neighbors(v):
            if u in strong:
                trace.count(msg)
                queue.append((v, u, msg))
    while queue:
        sender, receiver, msg = queue.popleft()
        if msg.candidate < best[receiver]:
            best[receiver] = msg.candidate
            fwd = LeaderElection(msg.candidate)
            for u in network.neighbors(receiver):
                if u in strong and u != sender:
                    trace.count(fwd)
                    queue.append((receiver, u, fwd))
    leader = min(strong)
    assert all(b == leader for b in best.values())
    return leader


def _tuple(p: Point) -> tuple[float, float]:
    return (p.x, p.y)


def _place_node(state: NodeState, target: int,
                placedmap: dict[int, Point]) -> Point | None:
    """Locate target in the frame of placedmap from known distances.

    Anchors are placed nodes whose distance to the target is visible in the
    node's 2-hop knowledge; the first consistent non-collinear triple wins.
    """
    k = state.knowledge
    anchors = []
    for x in sorted(placedmap):
        if x == target:
            continue
        try:
            if x == state.id:
                if target in k.nbr_dist:
                    anchors.append((x, k.dist_to(target)))
            elif k.are_adjacent(target, x):
                anchors.append((x, k.dist_between(target, x)))
        except KeyError:
            continue
    tries = 0
    for combo in itertools.combinations(anchors, 3):
        tries += 1
        if tries > 40:
            break
        refs = tuple(placedmap[x] for x, _ in combo)
        dists = tuple(d for _, d in combo)
        try:
            return locate_by_three_distances(refs, dists)
        except DegenerateGeometryError:
            continue
    return None


def localize_neighbors(state: NodeState, send) -> None:
    """Compute local-frame positions for all neighbors and start the
    wheel-construction requests for those touching only one rim node.

    The leader uses the type-3 message (its frame is the global one and the
    target localizes itself from the resulting announcements); other strongly
    interior nodes use type 4 and await the type-5 reply.  Weakly interior
    nodes with a wheel only place rim nodes and neighbors adjacent to at
    least two rims.
    """
    if state.ln_phase != 0 or state.wheel is None:
        return
    state.ln_phase = 1
    wheel = state.wheel
    state.placed = dict(wheel.local_pos)
    rim_set = set(wheel.rim)
    full_power = state.is_leader or state.node_class is NodeClass.STRONG
    for u in state.knowledge.neighbors:
        if u in state.placed:
            continue
        rim_anchors = sorted(x for x in rim_set
                             if state.knowledge.are_adjacent(u, x))
        if len(rim_anchors) >= 2:
            pos = _place_node(state, u, state.placed)
            if pos is None:
                state.faults.append(
                    f"{state.id}: cannot place neighbor {u} from rim anchors")
                continue
            state.placed[u] = pos
        elif len(rim_anchors) == 1:
            if not full_power:
                continue
            v_i = rim_anchors[0]
            v_next = wheel.rim_after(v_i)
            if state.is_leader:
                send(v_i, ConstructWheel(
                    sender=state.id,
                    sender_pos=_tuple(state.pos),
                    next_rim=v_next,
                    next_rim_pos=_tuple(state.placed[v_next])))
            else:
                send(v_i, ConstructWheelFind(
                    sender=state.id,
                    sender_pos=(0.0, 0.0),
                    recipient_pos=_tuple(state.placed[v_i]),
                    next_rim=v_next,
                    next_rim_pos=_tuple(state.placed[v_next]),
                    target=u))
                state.pending[u] = v_i
        else:
            state.faults.append(
                f"{state.id}: neighbor {u} adjacent to no rim node")
    _finalize_localize_neighbors(state, send)


def _finalize_localize_neighbors(state: NodeState, send) -> None:
    """Once every requested position is in, map to global and inform."""
    if state.ln_phase != 1 or state.pending:
        return
    if state.is_leader:
        state.to_global = IDENTITY
    else:
        refs = [s for s in state.iamat if s in state.placed][:2]
        if len(refs) < 2:
            return  # wait for more announcements
        s1, s2 = refs
        try:
            state.to_global = fit_isometry(
                (ORIGIN, state.placed[s1], state.placed[s2]),
                (state.pos, state.iamat[s1], state.iamat[s2]))
        except DegenerateGeometryError as e:
            state.faults.append(f"{state.id}: frame fit failed: {e}")
            state.ln_phase = 2
            return
    state.ln_phase = 2
    for u in state.knowledge.neighbors:
        if u in state.placed and u not in state.iamat:
            send(u, YouAreAt(sender=state.id, target=u,
                             pos=_tuple(state.to_global.apply(state.placed[u]))))


def _maybe_localize_neighbors(state: NodeState, send) -> None:
    if (state.ln_phase == 0 and state.localized and state.wheel is not None
            and len(state.iamat) >= 2):
        localize_neighbors(state, send)
    elif state.ln_phase == 1:
        _finalize_localize_neighbors(state, send)


def _self_localize(state: NodeState, send) -> None:
    """Self-localization from three announced neighbor positions."""
    senders = list(state.iamat)
    for combo in itertools.islice(itertools.combinations(senders, 3), 20):
        refs = tuple(state.iamat[s] for s in combo)
        dists = tuple(state.knowledge.dist_to(s) for s in combo)
        try:
            state.pos = locate_by_three_distances(refs, dists)
        except DegenerateGeometryError:
            continue
        _announce(state, send)
        return
    state.faults.append(
        f"{state.id}: could not trilaterate from {len(senders)} announcements")


def _announce(state: NodeState, send) -> None:
    msg_pos = _tuple(state.pos)
    for u in state.knowledge.neighbors:
        send(u, IAmAt(sender=state.id, pos=msg_pos))


def handle_message(state: NodeState, msg, send, record=None) -> None:
    """Per-node state transition for one delivered message."""
    r = state.knowledge.r
    if isinstance(msg, IAmAt):
        state.iamat[msg.sender] = Point(*msg.pos)
        if not state.localized and len(state.iamat) >= 3:
            _self_localize(state, send)
        _maybe_localize_neighbors(state, send)
    elif isinstance(msg, YouAreAt):
        if msg.target != state.id:
            state.faults.append(f"{state.id}: misrouted YouAreAt for {msg.target}")
            return
        new = Point(*msg.pos)
        if state.localized:
            if distance(new, state.pos) > POSITION_TOL * r:
                state.faults.append(
                    f"{state.id}: contradictory YouAreAt from {msg.sender}")
            return
        state.pos = new
        _announce(state, send)
        _maybe_localize_neighbors(state, send)
    elif isinstance(msg, ConstructWheel):
        _handle_construct_wheel(state, msg, send, record)
    elif isinstance(msg, ConstructWheelFind):
        _handle_construct_wheel_find(state, msg, send, record)
    elif isinstance(msg, FoundAt):
        if msg.target in state.pending:
            del state.pending[msg.target]
            state.placed[msg.target] = Point(*msg.pos)
            _finalize_localize_neighbors(state, send)
        else:
            state.faults.append(f"{state.id}: unexpected FoundAt for {msg.target}")
    else:
        state.faults.append(f"{state.id}: unknown message {msg!r}")


def _extend_frame(state: NodeState, msg, record) -> dict[int, Point] | None:
    """Place the requester and its named next rim into this node's own frame.

    Builds the W'' node set: this node's wheel, the requester, and the
    requester's neighboring rim node.  Returns None (with a fault logged)
    when the knowledge does not pin some position, which corresponds to a
    failure of the coverage lemmas the propagation argument relies on.
    """
    if state.wheel is None:
        state.faults.append(f"{state.id}: wheel request but no wheel")
        return None
    own = dict(state.wheel.local_pos)
    spos = _place_node(state, msg.sender, own)
    if spos is None:
        state.faults.append(
            f"{state.id}: cannot place requester {msg.sender} in own frame")
        return None
    own[msg.sender] = spos
    if msg.next_rim not in own:
        npos = _place_node(state, msg.next_rim, own)
        if npos is None:
            state.faults.append(
                f"{state.id}: cannot place next rim {msg.next_rim}")
            return None
        own[msg.next_rim] = npos
    if record is not None:
        record(frozenset(own))
    return own


def _handle_construct_wheel(state: NodeState, msg: ConstructWheel, send,
                            record) -> None:
    """Leader's type-3 request: localize the whole W'' in the global frame."""
    if not state.localized:
        state.faults.append(f"{state.id}: ConstructWheel before localization")
        return
    own = _extend_frame(state, msg, record)
    if own is None:
        return
    try:
        iso = fit_isometry(
            (ORIGIN, own[msg.sender], own[msg.next_rim]),
            (state.pos, Point(*msg.sender_pos), Point(*msg.next_rim_pos)))
    except DegenerateGeometryError as e:
        state.faults.append(f"{state.id}: type-3 frame fit failed: {e}")
        return
    for x, px in own.items():
        if x != state.id and x != msg.sender:
            send(x, YouAreAt(sender=state.id, target=x,
                             pos=_tuple(iso.apply(px))))


def _handle_construct_wheel_find(state: NodeState, msg: ConstructWheelFind,
                                 send, record) -> None:
    """Type-4 request: locate the target in the requester's local frame."""
    own = _extend_frame(state, msg, record)
    if own is None:
        return
    if msg.target in own:
        upos_own = own[msg.target]
    else:
        upos_own = _place_node(state, msg.target, own)
    if upos_own is None:
        state.faults.append(
            f"{state.id}: cannot place find-target {msg.target}")
        return
    try:
        iso = fit_isometry(
            (own[msg.sender], ORIGIN, own[msg.next_rim]),
            (Point(*msg.sender_pos), Point(*msg.recipient_pos),
             Point(*msg.next_rim_pos)))
    except DegenerateGeometryError as e:
        state.faults.append(f"{state.id}: type-4 frame fit failed: {e}")
        return
    send(msg.sender, FoundAt(sender=state.id, target=msg.target,
                             pos=_tuple(iso.apply(upos_own))))


class _Simulator:
    """Global event loop with per-link FIFO and optional random interleaving."""

    def __init__(self, network: Network, seed: int, order: str):
        self.network = network
        self.order = order
        self.rng = np.random.default_rng(seed)
        self.trace = SimTrace()
        self.links: dict[tuple[int, int], deque] = {}
        self.fifo: deque[tuple[int, int]] = deque()
        self.seen: set[tuple[int, int, str]] = set()
        self.events = 0
        self.construction_sets: list[frozenset[int]] = []
        maxdeg = max(network.degree(v) for v in network.ids)
        self.budget = 1000 + 20 * network.n * maxdeg * maxdeg
        self._round = 0

    def send_from(self, sender: int):
        def send(receiver: int, msg) -> None:
            key = (sender, receiver, repr(msg))
            if key in self.seen:
                return
            self.seen.add(key)
            self.trace.count(msg)
            link = (sender, receiver)
            self.links.setdefault(link, deque()).append((msg, self._round + 1))
            self.fifo.append(link)
        return send

    def record(self, nodes: frozenset[int]) -> None:
        if nodes not in self.construction_sets:
            self.construction_sets.append(nodes)

    def run(self, states: dict[int, NodeState]) -> None:
        rounds = 0
        while self.fifo:
            if self.order == "random":
                idx = int(self.rng.integers(len(self.fifo)))
                link = self.fifo[idx]
                del self.fifo[idx]
            else:
                link = self.fifo.popleft()
            queue = self.links[link]
            if not queue:
                continue
            msg, rnd = queue.popleft()
            sender, receiver = link
            self.events += 1
            assert self.events <= self.budget, "event budget exceeded"
            self.trace.log(self.events, sender, receiver, msg)
            rounds = max(rounds, rnd)
            self._round = rnd
            handle_message(states[receiver], msg, self.send_from(receiver),
                           record=self.record)
        self.trace.rounds = rounds


def run_simulation(network: Network, seed: int = 0,
                   order: str = "fifo") -> LocalizationResult:
    """Execute the whole pipeline and return per-node outcomes plus stats.

    order="fifo" is the deterministic default; order="random" draws the
    interleaving from the seed while preserving per-link FIFO.
    """
    knowledge = build_knowledge(network)
    wheels = {v: construct_communication_wheel(knowledge[v])
              for v in network.ids}
    classes = classify_all(network,
                           interior={v: w is not None for v, w in wheels.items()})
    trace = SimTrace()
    # The initial neighbor-list exchange is materialized, not simulated.
    trace.counters["neighbor_exchange"] = 2 * network.edge_count()
    try:
        leader = elect_leader(network, classes, trace)
    except NoLeaderError:
        return LocalizationResult(
            network_n=network.n, r=network.r, classes=classes, leader=None,
            no_leader=True, positions={v: None for v in network.ids},
            trace=trace, events=0, wheels=wheels, construction_sets=[],
            faults=[])
    sim = _Simulator(network, seed, order)
    sim.trace = trace
    states = {v: NodeState(id=v, knowledge=knowledge[v], node_class=classes[v],
                           wheel=wheels[v], is_leader=(v == leader))
              for v in network.ids}
    lead_state = states[leader]
    lead_state.pos = ORIGIN
    send = sim.send_from(leader)
    _announce(lead_state, send)
    for u in lead_state.wheel.rim:
        send(u, YouAreAt(sender=leader, target=u,
                         pos=_tuple(lead_state.wheel.local_pos[u])))
    localize_neighbors(lead_state, send)
    sim.run(states)
    faults = [f for v in sorted(states) for f in states[v].faults]
    return LocalizationResult(
        network_n=network.n, r=network.r, classes=classes, leader=leader,
        no_leader=False,
        positions={v: states[v].pos for v in network.ids},
        trace=sim.trace, events=sim.events, wheels=wheels,
        construction_sets=sim.construction_sets, faults=faults)


@dataclass
class VerificationReport:
    aligned: bool
    max_residual: float | None
    localized_fraction: dict[str, float]
    theorem6_applicable: bool
    theorem6_holds: bool | None
    missing: list[int]
    position_sound: bool | None

    @property
    def ok(self) -> bool:
        return bool(self.aligned and self.position_sound
                    and self.theorem6_holds is not False)


def verify_localization(result: LocalizationResult,
                        network: Network) -> VerificationReport:
    """Compare a run against ground truth, modulo one global isometry.

    Alignment uses three localized reference nodes (reflection allowed, since
    the leader's frame handedness is arbitrary); the residual is the max
    position error over all localized nodes after that single alignment.
    """
    localized = sorted(result.localized)
    classes = result.classes
    frac = {}
    for cls in NodeClass:
        members = [v for v in network.ids if classes[v] is cls]
        done = sum(1 for v in members if v in result.localized)
        frac[cls.value] = done / len(members) if members else 1.0
    applicable = (not result.no_leader
                  and strong_interior_connected(network, classes))
    missing: list[int] = []
    th6: bool | None = None
    if applicable:
        expected = {v for v in network.ids
                    if classes[v] in (NodeClass.STRONG, NodeClass.WEAK)}
        missing = sorted(expected - result.localized)
        th6 = not missing
    if len(localized) < 3:
        return VerificationReport(False, None, frac, applicable, th6,
                                  missing, None)
    iso = None
    for combo in itertools.islice(itertools.combinations(localized, 3), 50):
        try:
            iso = fit_isometry(
                tuple(result.positions[v] for v in combo),
                tuple(network.positions[v] for v in combo))
            break
        except DegenerateGeometryError:
            continue
    if iso is None:
        return VerificationReport(False, None, frac, applicable, th6,
                                  missing, None)
    residual = max(distance(iso.apply(result.positions[v]),
                            network.positions[v]) for v in localized)
    return VerificationReport(True, residual, frac, applicable, th6, missing,
                              position_sound=residual <= POSITION_TOL * network.r)
