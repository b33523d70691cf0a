"""Spatio-temporal topology graph construction and feasibility queries.

Pipeline: extract person-level camera transitions, label each TRUST/WARN/FAIL
through a seven-level priority hierarchy, aggregate TRUST transitions into
per-directed-edge statistics, derive zones by union-find over OVERLAP pairs,
and answer "could this candidate have made that transition" queries against
the finished graph.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .topology import TopologyConfig
from .world import Trajectory, Visit

# Labeling parameters (seconds).
EPSILON = 0.1          # tolerated timing jitter on negative transits
TAU_GAP = 0.3          # transits below this are suspicious tiny gaps
TAU_DUR = 0.5          # source visits at or below this are too short to trust
FRAME_GAP_S = 4.3      # intra-camera gap that splits a visit (re-entry)
SOFT_ADJ_CAP = 2.0     # cap on the dynamic soft-adjacency threshold

TIME_REVERSAL_SLACK = 5.0   # candidate gap below -5 s is physically impossible
DEFAULT_MARGIN = 2.0
MIN_EDGE_COUNT = 20


class StatViolation(Exception):
    """Edge statistics came out unordered; indicates an implementation bug."""


class Status(str, Enum):
    TRUST = "TRUST"
    WARN = "WARN"
    FAIL = "FAIL"


class Reason(str, Enum):
    MANUAL_ERROR = "ManualError"
    SIMULTANEOUS = "Simultaneous"
    OVERLAP = "Overlap"
    SOFT_ADJ_NEG = "SoftAdjNeg"
    BEYOND_ADJ = "BeyondAdj"
    RESIDUAL_NEG = "ResidualNeg"
    TINY_GAP = "TinyGap"
    SHORT_SEQ = "ShortSeq"
    DEFAULT = "Default"


EDGE_OVERLAP = "OVERLAP"
EDGE_SOFT_ADJ = "SOFT_ADJ"
EDGE_TRAVEL = "TRAVEL"


@dataclass(frozen=True)
class TransitionRecord:
    person: int
    from_cam: str
    to_cam: str
    exit_time: float
    enter_time: float
    duration_prev: float

    @property
    def transit(self) -> float:
        # enter - exit at full float precision; may be negative
        return self.enter_time - self.exit_time

    @property
    def key(self) -> tuple:
        return (self.person, self.from_cam, self.exit_time,
                self.to_cam, self.enter_time)

    @property
    def edge(self) -> tuple[str, str]:
        return (self.from_cam, self.to_cam)


@dataclass(frozen=True)
class LabeledTransition:
    record: TransitionRecord
    status: Status
    reason: Reason


@dataclass(frozen=True)
class LabelContext:
    manual_errors: frozenset = frozenset()
    simultaneous: frozenset = frozenset()    # (person, camera, enter) keys
    overlap_pairs: frozenset = frozenset()
    soft_pairs: frozenset = frozenset()
    thresholds: dict = field(default_factory=dict)  # pair -> theta


@dataclass(frozen=True)
class EdgeStats:
    from_cam: str
    to_cam: str
    edge_type: str
    t_min: float
    t_med: float
    t_max: float
    t_mean: float
    t_std: float
    n: int


@dataclass(frozen=True)
class Zone:
    id: str
    cameras: frozenset
    name: str
    kind: str  # Atomic | Singleton | Composite


@dataclass(frozen=True)
class NodeInfo:
    camera: str
    zone_id: str
    sub_area: str


@dataclass(frozen=True)
class Sttg:
    nodes: dict[str, NodeInfo]
    edges: dict[tuple[str, str], EdgeStats]
    zones: tuple[Zone, ...]
    composite_zones: tuple[Zone, ...]

    def edge(self, from_cam: str, to_cam: str) -> EdgeStats | None:
        return self.edges.get((from_cam, to_cam))

    def zone_of(self, camera: str) -> Zone:
        zid = self.nodes[camera].zone_id
        for z in self.zones:
            if z.id == zid:
                return z
        raise KeyError(camera)


# --- Phase 1: transition extraction ----------------------------------------

def merge_trajectory_visits(traj: Trajectory,
                            frame_gap_s: float = FRAME_GAP_S) -> list[Visit]:
    """Merge consecutive same-camera visits separated by <= frame_gap_s.

    Larger gaps are genuine re-entries and stay split, which later yields a
    self-transition record.
    """
    merged: list[Visit] = []
    for v in traj.visits:
        if (merged and merged[-1].camera == v.camera
                and v.enter - merged[-1].exit <= frame_gap_s):
            prev = merged[-1]
            merged[-1] = Visit(camera=prev.camera, enter=prev.enter,
                               exit=max(prev.exit, v.exit))
        else:
            merged.append(v)
    return merged


def extract_transitions(trajectories, frame_gap_s: float = FRAME_GAP_S
                        ) -> list[TransitionRecord]:
    """One record per consecutive visit pair of the same person."""
    out: list[TransitionRecord] = []
    for traj in trajectories:
        visits = merge_trajectory_visits(traj, frame_gap_s)
        for a, b in zip(visits, visits[1:]):
            out.append(TransitionRecord(
                person=traj.person,
                from_cam=a.camera,
                to_cam=b.camera,
                exit_time=a.exit,
                enter_time=b.enter,
                duration_prev=a.exit - a.enter,
            ))
    return out


# --- Phase 2: priority-based labeling ---------------------------------------

def compute_soft_adj_thresholds(transitions, soft_pairs) -> dict:
    """Dynamic acceptance threshold per soft-adjacent pair.

    theta = min(P95 of |negative transits| over the pair, 2 s); pairs with no
    negative transits get 0. P95 uses linear interpolation (numpy default).
    """
    soft_pairs = {frozenset(p) for p in soft_pairs}
    negatives: dict[frozenset, list[float]] = {p: [] for p in soft_pairs}
    for t in transitions:
        pair = frozenset((t.from_cam, t.to_cam))
        if pair in negatives and t.transit < 0:
            negatives[pair].append(abs(t.transit))
    out = {}
    for pair, vals in negatives.items():
        if not vals:
            out[pair] = 0.0
        else:
            out[pair] = min(float(np.percentile(vals, 95)), SOFT_ADJ_CAP)
    return out


def _tracklet_keys(t: TransitionRecord) -> tuple[tuple, tuple]:
    enter_prev = t.exit_time - t.duration_prev
    return ((t.person, t.from_cam, enter_prev),
            (t.person, t.to_cam, t.enter_time))


def label_transition(t: TransitionRecord, ctx: LabelContext
                     ) -> LabeledTransition:
    """Apply the seven-level priority hierarchy; first matching rule wins."""
    def done(status, reason):
        return LabeledTransition(record=t, status=status, reason=reason)

    if t.key in ctx.manual_errors:
        return done(Status.FAIL, Reason.MANUAL_ERROR)
    src, dst = _tracklet_keys(t)
    if src in ctx.simultaneous or dst in ctx.simultaneous:
        return done(Status.FAIL, Reason.SIMULTANEOUS)
    pair = frozenset((t.from_cam, t.to_cam))
    if pair in ctx.overlap_pairs:
        return done(Status.TRUST, Reason.OVERLAP)
    if pair in ctx.soft_pairs:
        theta = ctx.thresholds.get(pair, 0.0)
        if t.transit < -EPSILON:
            if abs(t.transit) <= theta:
                return done(Status.WARN, Reason.SOFT_ADJ_NEG)
            return done(Status.FAIL, Reason.BEYOND_ADJ)
        # non-negative soft transits fall through to the residual checks
    if t.transit < -EPSILON:
        return done(Status.FAIL, Reason.RESIDUAL_NEG)
    if 0 <= t.transit < TAU_GAP:
        return done(Status.WARN, Reason.TINY_GAP)
    if t.duration_prev <= TAU_DUR:
        return done(Status.WARN, Reason.SHORT_SEQ)
    return done(Status.TRUST, Reason.DEFAULT)


def label_transitions(transitions, topology: TopologyConfig,
                      manual_errors=frozenset(), simultaneous=frozenset()
                      ) -> list[LabeledTransition]:
    thresholds = compute_soft_adj_thresholds(transitions, topology.soft_pairs)
    ctx = LabelContext(
        manual_errors=frozenset(manual_errors),
        simultaneous=frozenset(simultaneous),
        overlap_pairs=topology.overlap_pairs,
        soft_pairs=topology.soft_pairs,
        thresholds=thresholds,
    )
    return [label_transition(t, ctx) for t in transitions]


# --- Zones -------------------------------------------------------------------

class UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}
        self.rank = {x: 0 for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1

    def components(self) -> list[frozenset]:
        groups: dict = {}
        for x in self.parent:
            groups.setdefault(self.find(x), set()).add(x)
        return sorted((frozenset(g) for g in groups.values()),
                      key=lambda g: sorted(g))


def build_zones(cameras, overlap_pairs, soft_pairs,
                zone_names=None, composite_names=None
                ) -> tuple[tuple[Zone, ...], tuple[Zone, ...]]:
    """Union-find zones over OVERLAP pairs; composites also unite SOFT_ADJ.

    Atomic zones partition the cameras; a composite zone is emitted only when
    soft-adjacency actually merges two or more atomic zones.
    """
    zone_names = zone_names or {}
    composite_names = composite_names or {}
    cameras = tuple(cameras)

    uf = UnionFind(cameras)
    for pair in overlap_pairs:
        a, b = sorted(pair)
        uf.union(a, b)
    atomic = uf.components()

    zones = []
    for comp in atomic:
        zid, name = zone_names.get(
            comp, (f"Z_{min(comp)}", f"Area around {min(comp)}")
        )
        kind = "Singleton" if len(comp) == 1 else "Atomic"
        zones.append(Zone(id=zid, cameras=comp, name=name, kind=kind))

    uf2 = UnionFind(cameras)
    for pair in overlap_pairs | frozenset(frozenset(p) for p in soft_pairs):
        a, b = sorted(pair)
        uf2.union(a, b)
    composites = []
    for comp in uf2.components():
        members = [z for z in zones if z.cameras <= comp]
        if len(members) < 2:
            continue
        zid, name = composite_names.get(
            comp,
            (f"C_{min(comp)}", " + ".join(sorted(m.name for m in members))),
        )
        composites.append(Zone(id=zid, cameras=comp, name=name,
                               kind="Composite"))
    return tuple(zones), tuple(composites)


# --- Phase 3: directed-edge aggregation --------------------------------------

def _edge_type(from_cam: str, to_cam: str, topology: TopologyConfig) -> str:
    pair = frozenset((from_cam, to_cam))
    if pair in topology.overlap_pairs:
        return EDGE_OVERLAP
    if pair in topology.soft_pairs:
        return EDGE_SOFT_ADJ
    return EDGE_TRAVEL


def aggregate_edges(trusted, topology: TopologyConfig) -> Sttg:
    """Build the graph from TRUST transitions only (pass WARN in explicitly
    if you want the documented non-standard behavior)."""
    by_edge: dict[tuple[str, str], list[float]] = {}
    for t in trusted:
        by_edge.setdefault(t.edge, []).append(t.transit)

    edges = {}
    for (a, b), transits in sorted(by_edge.items()):
        arr = sorted(transits)
        n = len(arr)
        t_min = arr[0]
        t_max = arr[-1]
        if n % 2:
            t_med = arr[n // 2]
        else:
            t_med = (arr[n // 2 - 1] + arr[n // 2]) / 2.0
        t_mean = float(np.mean(arr))
        t_std = float(np.std(arr))
        if not (t_min <= t_med <= t_max):
            raise StatViolation(
                f"edge {a}->{b}: min {t_min} / med {t_med} / max {t_max}"
            )
        edges[(a, b)] = EdgeStats(
            from_cam=a, to_cam=b, edge_type=_edge_type(a, b, topology),
            t_min=t_min, t_med=t_med, t_max=t_max,
            t_mean=t_mean, t_std=t_std, n=n,
        )

    zones, composites = build_zones(
        topology.cameras, topology.overlap_pairs, topology.soft_pairs,
        topology.zone_names, topology.composite_names,
    )
    cam_zone = {}
    for z in zones:
        for c in z.cameras:
            cam_zone[c] = z.id
    nodes = {
        c: NodeInfo(camera=c, zone_id=cam_zone[c],
                    sub_area=topology.sub_areas.get(c, c))
        for c in topology.cameras
    }
    return Sttg(nodes=nodes, edges=edges, zones=zones,
                composite_zones=composites)


def build_sttg(world, topology: TopologyConfig,
               frame_gap_s: float = FRAME_GAP_S,
               manual_errors=frozenset(), simultaneous=frozenset(),
               include_warn: bool = False) -> Sttg:
    """Full pipeline: extract, label, aggregate.

    include_warn additionally feeds WARN transitions into the statistics;
    this is a documented deviation from the standard TRUST-only behavior
    and defaults to off.
    """
    transitions = extract_transitions(world.trajectories, frame_gap_s)
    labeled = label_transitions(transitions, topology,
                                manual_errors, simultaneous)
    keep = {Status.TRUST, Status.WARN} if include_warn else {Status.TRUST}
    trusted = [lt.record for lt in labeled if lt.status in keep]
    return aggregate_edges(trusted, topology)


# --- Temporal feasibility ----------------------------------------------------

class FeasStatus(str, Enum):
    FEASIBLE = "FEASIBLE"
    IMPOSSIBLE = "IMPOSSIBLE"
    UNKNOWN = "UNKNOWN"


class FeasReason(str, Enum):
    NOT_PRESENT = "NOT_PRESENT"
    TIME_REVERSAL = "TIME_REVERSAL"
    TOO_FAST = "TOO_FAST"
    TOO_SLOW = "TOO_SLOW"


@dataclass(frozen=True)
class Feasibility:
    status: FeasStatus
    reason: FeasReason | None = None
    delta: float | None = None

    @property
    def eliminated(self) -> bool:
        return self.status is FeasStatus.IMPOSSIBLE


def candidate_gap(traj: Trajectory | None, c1: str, c2: str,
                  t_ref: float) -> float | None:
    """The candidate's inter-camera gap for the (c1, c2) sighting pair.

    Over all visit pairs (v1 at c1, v2 at c2) the gap is enter(v2) - exit(v1);
    when several exist we keep the one closest to the reference gap t_ref
    (the most charitable deterministic choice). None when the candidate was
    never seen at one of the cameras.
    """
    if traj is None:
        return None
    at_c1 = [v for v in traj.visits if v.camera == c1]
    at_c2 = [v for v in traj.visits if v.camera == c2]
    if not at_c1 or not at_c2:
        return None
    best = None
    for v1 in at_c1:
        for v2 in at_c2:
            delta = v2.enter - v1.exit
            if best is None or abs(delta - t_ref) < abs(best - t_ref):
                best = delta
    return best


def classify_feasibility(cand: Trajectory | None, c1: str, c2: str,
                         t_ref: float, sttg: Sttg,
                         margin: float = DEFAULT_MARGIN) -> Feasibility:
    """Four-stage feasibility check for one candidate against a sighting pair.

    1. presence at both cameras, else IMPOSSIBLE(NOT_PRESENT)
    2. gap < -5 s, IMPOSSIBLE(TIME_REVERSAL)
    3. no direct edge c1->c2, UNKNOWN
    4. 0 < gap < t_min/margin TOO_FAST; gap > t_max*margin TOO_SLOW;
       otherwise FEASIBLE (gaps in [-5, 0] fall through to FEASIBLE)
    """
    delta = candidate_gap(cand, c1, c2, t_ref)
    if delta is None:
        return Feasibility(FeasStatus.IMPOSSIBLE, FeasReason.NOT_PRESENT)
    if delta < -TIME_REVERSAL_SLACK:
        return Feasibility(FeasStatus.IMPOSSIBLE, FeasReason.TIME_REVERSAL,
                           delta)
    edge = sttg.edge(c1, c2)
    if edge is None:
        return Feasibility(FeasStatus.UNKNOWN, delta=delta)
    if 0 < delta < edge.t_min / margin:
        return Feasibility(FeasStatus.IMPOSSIBLE, FeasReason.TOO_FAST, delta)
    if delta > edge.t_max * margin:
        return Feasibility(FeasStatus.IMPOSSIBLE, FeasReason.TOO_SLOW, delta)
    return Feasibility(FeasStatus.FEASIBLE, delta=delta)


# --- Export ------------------------------------------------------------------

def sttg_to_json(sttg: Sttg) -> dict:
    return {
        "nodes": [
            {"camera": n.camera, "zone": n.zone_id, "sub_area": n.sub_area}
            for n in sorted(sttg.nodes.values(), key=lambda n: n.camera)
        ],
        "edges": [
            {
                "from": e.from_cam, "to": e.to_cam, "type": e.edge_type,
                "t_min": e.t_min, "t_med": e.t_med, "t_max": e.t_max,
                "t_mean": e.t_mean, "t_std": e.t_std, "n": e.n,
            }
            for _, e in sorted(sttg.edges.items())
        ],
        "zones": [
            {"id": z.id, "cameras": sorted(z.cameras), "name": z.name,
             "kind": z.kind}
            for z in sttg.zones
        ],
        "composite_zones": [
            {"id": z.id, "cameras": sorted(z.cameras), "name": z.name,
             "kind": z.kind}
            for z in sttg.composite_zones
        ],
    }


def sttg_from_json(obj: dict) -> Sttg:
    zones = tuple(
        Zone(id=z["id"], cameras=frozenset(z["cameras"]), name=z["name"],
             kind=z["kind"])
        for z in obj["zones"]
    )
    composites = tuple(
        Zone(id=z["id"], cameras=frozenset(z["cameras"]), name=z["name"],
             kind=z["kind"])
        for z in obj["composite_zones"]
    )
    nodes = {
        n["camera"]: NodeInfo(camera=n["camera"], zone_id=n["zone"],
                              sub_area=n["sub_area"])
        for n in obj["nodes"]
    }
    edges = {
        (e["from"], e["to"]): EdgeStats(
            from_cam=e["from"], to_cam=e["to"], edge_type=e["type"],
            t_min=e["t_min"], t_med=e["t_med"], t_max=e["t_max"],
            t_mean=e["t_mean"], t_std=e["t_std"], n=e["n"],
        )
        for e in obj["edges"]
    }
    return Sttg(nodes=nodes, edges=edges, zones=zones,
                composite_zones=composites)


def sttg_to_dot(sttg: Sttg) -> str:
    lines = ["digraph sttg {"]
    for n in sorted(sttg.nodes.values(), key=lambda n: n.camera):
        lines.append(f'  "{n.camera}" [label="{n.camera}\\n{n.zone_id}"];')
    color = {EDGE_OVERLAP: "blue", EDGE_SOFT_ADJ: "orange",
             EDGE_TRAVEL: "gray"}
    for _, e in sorted(sttg.edges.items()):
        lines.append(
            f'  "{e.from_cam}" -> "{e.to_cam}" '
            f'[color={color[e.edge_type]}, label="{e.t_med:.1f}s"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
