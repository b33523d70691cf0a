"""The shipped regression world: 90 persons on the factory topology.

Hand-constructed so the pipeline reproduces the reference walkthroughs
end to end:

* person 7's trail narrows 90 -> 11 (bottoms color Grey) -> 3 (top color
  Black) -> 1 (hair Short) through greedy information gain;
* the c05 -> c08 edge aggregates to exactly t_min 7.6 / t_med 11.2 /
  t_max 20.7 over n = 23 trusted transitions;
* person 3's two-sighting check eliminates 15 -> 5 with reasons
  {5 TIME_REVERSAL, 1 TOO_SLOW, 4 NOT_PRESENT}, then one attribute question
  (bottoms color Black) isolates the target;
* person 3's zone task goes 15 -> 2 by attribute, then 2 -> 1 by the
  warehouse sub-area question (camera c01 vs c02).

Every trajectory only walks declared movement edges, so the factory graph
comes out with exactly 110 directed edges including 16 self-loops. The
builder asserts all of these facts; `build_fixture_world()` is deterministic
and is what ships as data/factory_small.json.
"""

from __future__ import annotations

from collections import deque
from .schema import default_schema
from .topology import TopologyConfig, load_topology
from .world import PersonRecord, Trajectory, Visit, World, validate_world

HERO3 = 3            # two-sighting / zone walkthrough target
CLONE = 1            # attribute twin of HERO3, seen only on the parking side
T1HERO = 7           # attribute-narrowing walkthrough target

F_GROUP = (20, 22, 45, 86)                 # feasible besides the hero
F_TRANSITS = (9.5, 12.0, 15.0, 19.0)
F_LOWERS = ("White", "Brown", "Red", "Purple")
TR_GROUP = (10, 19, 40, 65, 73)            # time-reversal candidates
TS_PERSON = 74                             # too-slow candidate (gap 89.4 s)
NP_EXTRA = (63, 72, 89)                    # absent from one or both cameras

GREY_BLACKS = (T1HERO, 5, 12)              # grey bottoms, black tops
GREY_BLACK_HAIR = ("Short (Ear-length)", "Long (Shoulder+)", "Ponytail/Bun")
GREY_WHITES = (14, 25, 27, 31)
GREY_GREENS = (33, 50, 52, 60)

UNC_UPPER = (80, 81, 82)                   # make top color partially observed
UNC_LOWER = (83, 84, 85, 87)

WALKERS = (30, 32, 34, 35, 36, 37, 38, 39, 41, 42,
           43, 44, 46, 47, 48, 49, 51, 53)
WALKER_TRANSITS = (7.6, 8.0, 8.3, 8.6, 9.2, 9.9, 10.3, 10.7, 11.0, 11.2,
                   11.9, 13.1, 14.2, 15.9, 17.0, 18.2, 19.8, 20.7)
# These three transits are the edge's min / median / max and must survive
# float subtraction bit-exactly, so their scenes sit at small timestamps.
EXACT_TRANSITS = {7.6, 11.2, 20.7}

EDGE_C1, EDGE_C2 = "c05", "c08"
EDGE_STATS = (7.6, 11.2, 20.7, 23)
HERO_TRANSIT = 8.9
TS_GAP = 89.4

N_PERSONS = 90

BASE_ATTRS = {
    "hair_visibility": "Visible",
    "hair_style": "Medium (Neck-length)",
    "hair_color": "Black",
    "headwear_type": "None",
    "eyewear_type": "None",
    "mask_state": "No Mask",
    "facial_hair": "None",
    "upper_garment_type": "Jacket",
    "upper_color_layout": "Solid",
    "upper_garment_color": "White",
    "upper_state": ("Long/Short Sleeve",),
    "upper_fit_style": "Regular",
    "torso_bag_type": "None",
    "leg_visibility": "Partially Covered",
    "lower_garment_type": "Trousers",
    "lower_garment_color": "Black",
    "lower_fit_style": "Regular",
    "shoe_type": "Sneakers",
    "shoe_color": "Black",
    "items_held": "None",
    "visual_age_style": "Young Adult",
    "body_shape": "Normal",
    "body_features": ("None",),
    "visual_gender": "Male",
}

BLUE_POOL = (HERO3, CLONE) + F_GROUP + TR_GROUP + (TS_PERSON,) + NP_EXTRA


def _gallery() -> list[PersonRecord]:
    attrs = {pid: dict(BASE_ATTRS) for pid in range(N_PERSONS)}
    for pid in BLUE_POOL:
        attrs[pid]["upper_garment_color"] = "Blue"
    for pid in TR_GROUP + (TS_PERSON,):
        attrs[pid]["lower_garment_color"] = "Blue"
    for pid in NP_EXTRA:
        attrs[pid]["lower_garment_color"] = "Blue"
    for pid, lower in zip(F_GROUP, F_LOWERS):
        attrs[pid]["lower_garment_color"] = lower
    # HERO3 and CLONE keep the base black bottoms: attribute twins.
    for pid in GREY_BLACKS + GREY_WHITES + GREY_GREENS:
        attrs[pid]["lower_garment_color"] = "Grey"
    for pid, hair in zip(GREY_BLACKS, GREY_BLACK_HAIR):
        attrs[pid]["upper_garment_color"] = "Black"
        attrs[pid]["hair_style"] = hair
    for pid in GREY_GREENS:
        attrs[pid]["upper_garment_color"] = "Green"
    for pid in UNC_UPPER:
        attrs[pid]["upper_garment_color"] = "Uncertain"
    for pid in UNC_LOWER:
        attrs[pid]["lower_garment_color"] = "Uncertain"
    return [PersonRecord(id=pid, attrs=attrs[pid])
            for pid in range(N_PERSONS)]


def _exact_enter(exit_t: float, transit: float) -> float:
    """An enter time whose float difference from exit_t is exactly transit."""
    enter = exit_t + transit
    if enter - exit_t != transit:
        raise AssertionError(
            f"exit={exit_t} cannot carry transit {transit} bit-exactly; "
            "pick a smaller timestamp"
        )
    return enter


def _designed_trajectories() -> dict[int, tuple[Visit, ...]]:
    trajs: dict[int, tuple[Visit, ...]] = {}

    # Hero: long warehouse stay (primary camera), then stairwell, then the
    # anchored c05 -> c08 hop at 8.9 s.
    v_c01 = Visit("c01", 800.0, 1200.0)
    v_c03 = Visit("c03", 1260.0, 1320.0)
    v_c05 = Visit("c05", 1380.0, 1420.0)
    enter8 = 1420.0 + HERO_TRANSIT
    trajs[HERO3] = (v_c01, v_c03, v_c05,
                    Visit("c08", enter8, enter8 + 31.0))

    # Clone: parking side during the window, never at c05/c08.
    trajs[CLONE] = (Visit("c02", 700.0, 1000.0), Visit("c04", 1100.0, 1150.0),
                    Visit("c11", 1250.0, 1300.0))

    # Feasible group: in-window warehouse stay, later a c05 -> c08 hop.
    for k, (pid, transit) in enumerate(zip(F_GROUP, F_TRANSITS)):
        c01 = Visit("c01", 600.0 + 10 * k, 900.0 + 10 * k)
        c05 = Visit("c05", 1700.0 + 200 * k, 1800.0 + 200 * k)
        enter = c05.exit + transit
        trajs[pid] = (c01, c05, Visit("c08", enter, enter + 30.0))

    # Time reversals: seen at c08 before c05 (gap far below -5 s).
    tr_zone = (("c01", 850.0), ("c01", 860.0), ("c04", 900.0),
               ("c04", 910.0), ("c04", 920.0))
    for k, (pid, (zcam, zt)) in enumerate(zip(TR_GROUP, tr_zone)):
        c08 = Visit("c08", 2000.0 + 120 * k, 2030.0 + 120 * k)
        c05 = Visit("c05", c08.exit + 70.0, c08.exit + 120.0)
        trajs[pid] = (Visit(zcam, zt, zt + 100.0), c08, c05)

    # Too slow: wanders through the passage, reaching c08 89.4 s after
    # leaving c05 (no direct consecutive hop, so the edge stays clean).
    c05 = Visit("c05", 2200.0, 2260.0)
    c06 = Visit("c06", 2300.0, 2330.0)
    trajs[TS_PERSON] = (Visit("c01", 820.0, 920.0), c05, c06,
                        Visit("c08", 2260.0 + TS_GAP, 2260.0 + TS_GAP + 28.0))

    # Not-present variants.
    trajs[63] = (Visit("c01", 700.0, 800.0), Visit("c05", 1600.0, 1650.0),
                 Visit("c04", 1700.0, 1780.0))
    trajs[72] = (Visit("c05", 1300.0, 1450.0), Visit("c04", 1500.0, 1560.0),
                 Visit("c01", 1600.0, 1700.0))
    trajs[89] = (Visit("c02", 900.0, 1100.0), Visit("c07", 1200.0, 1260.0),
                 Visit("c08", 1300.0, 1360.0))

    # Transit walkers populate the anchored edge's statistics. The extreme
    # three (min / median / max) run their hop at small timestamps so the
    # transit subtraction is bit-exact; all of them also stop by the
    # warehouse so the zone window holds 33 people.
    small_exit = 4.5
    normal_k = 0
    for pid, transit in zip(WALKERS, WALKER_TRANSITS):
        if transit in EXACT_TRANSITS:
            exit5 = small_exit
            small_exit += 0.5
            enter = _exact_enter(exit5, transit)
            assert enter - exit5 == transit
            trajs[pid] = (Visit("c05", exit5 - 2.5, exit5),
                          Visit("c08", enter, enter + 30.0),
                          Visit("c01", 600.0, 700.0))
        else:
            k = normal_k
            normal_k += 1
            c01 = Visit("c01", 600.0 + 4 * k, 700.0 + 4 * k)
            c05 = Visit("c05", 3000.0 + 60 * k, 3050.0 + 60 * k)
            enter = c05.exit + transit
            trajs[pid] = (c01, c05, Visit("c08", enter, enter + 25.0))
    return trajs


def _required_edges(topology: TopologyConfig) -> set[tuple[str, str]]:
    edges: set[tuple[str, str]] = set()
    for cam in topology.cameras:
        edges.add((cam, cam))
    for pair in topology.overlap_pairs | topology.soft_pairs | \
            topology.travel_pairs:
        a, b = sorted(pair)
        edges.add((a, b))
        edges.add((b, a))
    return edges


def _coverage_walks(topology: TopologyConfig,
                    covered: set[tuple[str, str]],
                    n_bodies: int) -> list[list[str]]:
    """Camera sequences that traverse every still-uncovered required edge.

    Walks only use declared edges and never touch the anchored c05 -> c08
    hop, which belongs exclusively to the designed transit walkers.
    """
    required = _required_edges(topology)
    anchored = (EDGE_C1, EDGE_C2)
    allowed = required - {anchored}
    remaining = sorted(required - covered - {anchored})
    out_moves: dict[str, list[str]] = {}
    for a, b in sorted(allowed):
        if a != b:
            out_moves.setdefault(a, []).append(b)

    def hop_toward(cur: str, goals: set[str]) -> str | None:
        if cur in goals:
            return None
        seen = {cur}
        queue = deque([(cur, None)])
        while queue:
            cam, first = queue.popleft()
            for nxt in out_moves.get(cam, ()):
                if nxt in seen:
                    continue
                hop = first or nxt
                if nxt in goals:
                    return hop
                seen.add(nxt)
                queue.append((nxt, hop))
        return None

    remaining_set = set(remaining)
    walks: list[list[str]] = []
    while remaining_set:
        start = min(remaining_set)
        path = [start[0], start[1]]
        remaining_set.discard(start)
        while len(path) < 18:
            cur = path[-1]
            nxts = sorted(b for (a, b) in remaining_set if a == cur)
            if nxts:
                path.append(nxts[0])
                remaining_set.discard((cur, nxts[0]))
                continue
            goals = {a for (a, _) in remaining_set}
            if not goals:
                break
            hop = hop_toward(cur, goals)
            if hop is None:
                break
            path.append(hop)
        walks.append(path)
    if len(walks) > n_bodies:
        raise AssertionError(
            f"coverage needs {len(walks)} walkers, only {n_bodies} free"
        )
    # Idle bodies take a short stroll on already-covered corridors.
    while len(walks) < n_bodies:
        walks.append(["c06", "c07", "c06"])
    for walk in walks:
        k = 0
        while len(set(walk)) < 3 and k < 8:
            extra = sorted(
                n for n in out_moves.get(walk[-1], ()) if n not in walk
            )
            walk.append(extra[0] if extra else out_moves[walk[-1]][0])
            k += 1
    return walks


def _walk_to_visits(walk: list[str], topology: TopologyConfig,
                    t0: float) -> tuple[Visit, ...]:
    visits = []
    t = t0
    prev = None
    for i, cam in enumerate(walk):
        if prev is not None:
            if cam == prev:
                transit = 10.0            # re-entry, beyond the frame gap
            else:
                pair = frozenset((prev, cam))
                if pair in topology.overlap_pairs:
                    transit = -0.5
                elif pair in topology.soft_pairs:
                    transit = 0.8
                else:
                    transit = 6.0 + (i % 9)
            t += transit
        visits.append(Visit(camera=cam, enter=t, exit=t + 20.0))
        t += 20.0
        prev = cam
    return tuple(sorted(visits, key=lambda v: (v.enter, v.exit, v.camera)))


def build_fixture_world() -> World:
    topology = load_topology("factory")
    gallery = _gallery()
    trajs = _designed_trajectories()

    covered: set[tuple[str, str]] = set()
    for visits in trajs.values():
        for a, b in zip(visits, visits[1:]):
            covered.add((a.camera, b.camera))

    bodies = [pid for pid in range(N_PERSONS) if pid not in trajs]
    walks = _coverage_walks(topology, covered, len(bodies))
    for j, (pid, walk) in enumerate(zip(bodies, walks)):
        trajs[pid] = _walk_to_visits(walk, topology, 6000.0 + 400.0 * j)

    world = World(
        schema=default_schema(),
        gallery=tuple(gallery),
        trajectories=tuple(
            Trajectory(person=pid, visits=trajs[pid])
            for pid in range(N_PERSONS)
        ),
        cameras=topology.cameras,
        topology_name="factory",
    )
    validate_world(world)
    _check_fixture(world, topology)
    return world


def _check_fixture(world: World, topology: TopologyConfig) -> None:
    from .sttg import build_sttg

    sttg = build_sttg(world, topology)
    n_edges = len(sttg.edges)
    n_self = sum(1 for (a, b) in sttg.edges if a == b)
    if n_edges != 110 or n_self != 16:
        raise AssertionError(
            f"fixture graph has {n_edges} edges / {n_self} self-loops"
        )
    edge = sttg.edge(EDGE_C1, EDGE_C2)
    t_min, t_med, t_max, n = EDGE_STATS
    if (edge.t_min, edge.t_med, edge.t_max, edge.n) != (t_min, t_med,
                                                        t_max, n):
        raise AssertionError(
            f"anchored edge stats off: {edge.t_min}/{edge.t_med}/"
            f"{edge.t_max} n={edge.n}"
        )
    blues = [p.id for p in world.gallery
             if p.attrs["upper_garment_color"] == "Blue"]
    greys = [p.id for p in world.gallery
             if p.attrs["lower_garment_color"] == "Grey"]
    if len(blues) != 15 or len(greys) != 11:
        raise AssertionError(f"pools off: {len(blues)} blue, {len(greys)} grey")
