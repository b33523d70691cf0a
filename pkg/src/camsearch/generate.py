"""Seeded synthetic world generation over the shipped topologies.

All randomness flows through a numpy PCG64 generator; identical (config,
seed) pairs produce identical worlds on any platform. Trajectories are
zone-biased random walks over the topology's movement graph with transit
times drawn from per-edge priors, so the downstream graph pipeline recovers
realistic OVERLAP / SOFT_ADJ / TRAVEL statistics.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace

import numpy as np

from .schema import UNCERTAIN, default_schema
from .sttg import extract_transitions
from .topology import ConfigError, TopologyConfig, load_topology
from .world import PersonRecord, Trajectory, Visit, World, validate_world


class InsufficientTransitions(Exception):
    pass


@dataclass(frozen=True)
class WorldGenConfig:
    topology: str = "factory"
    n_persons: int = 90
    seed: int = 0
    attr_marginals: dict | None = None
    mean_cams_per_person: float = 5.9
    uncertain_rate: float = 0.0117
    edge_time_model: str = "lognormal"  # or "triangular"

    def __post_init__(self):
        if self.n_persons < 1:
            raise ConfigError("n_persons must be >= 1")
        if not 0.0 <= self.uncertain_rate <= 1.0:
            raise ConfigError("uncertain_rate must be in [0, 1]")
        if self.edge_time_model not in ("lognormal", "triangular"):
            raise ConfigError(
                f"unknown edge_time_model {self.edge_time_model!r}"
            )


# Marginal value weights used when the config does not override them.
# Skewed toward common street clothing so candidate pools land in the
# 5-30 range for salient clues and 30+ for common ones.
DEFAULT_MARGINALS: dict[str, dict[str, float]] = {
    "hair_visibility": {"Visible": 0.82, "Covered by Hat": 0.14,
                        "Bald/Shaved": 0.04},
    "hair_style": {"Short (Ear-length)": 0.38, "Medium (Neck-length)": 0.22,
                   "Long (Shoulder+)": 0.16, "Ponytail/Bun": 0.10,
                   "Afro/Textured": 0.04, "Bald": 0.06, "Other": 0.04},
    "hair_color": {"Black": 0.52, "Brown": 0.22, "Blonde": 0.08,
                   "Gray/White": 0.10, "Dyed/Unnatural": 0.05, "Other": 0.03},
    "headwear_type": {"None": 0.68, "Cap": 0.15, "Beanie": 0.05,
                      "Helmet": 0.06, "Bucket Hat": 0.03, "Other": 0.03},
    "eyewear_type": {"None": 0.75, "Glasses": 0.18, "Sunglasses": 0.05,
                     "Other": 0.02},
    "mask_state": {"No Mask": 0.72, "Properly Worn": 0.18, "Chin Mask": 0.07,
                   "Other": 0.03},
    "facial_hair": {"None": 0.70, "Stubble": 0.12, "Beard": 0.10,
                    "Mustache": 0.05, "Other": 0.03},
    "upper_garment_type": {"T-shirt": 0.18, "Shirt": 0.14, "Hoodie": 0.12,
                           "Sweatshirt": 0.09, "Jacket": 0.18, "Vest": 0.04,
                           "Suit": 0.03, "Puffer/Padding (Long/Short)": 0.06,
                           "Coat": 0.05, "Dress": 0.02, "Uniform/Gown": 0.06,
                           "Other": 0.03},
    "upper_color_layout": {"Solid": 0.62, "Layered": 0.10, "Patterned": 0.08,
                           "Colorblock": 0.06, "Graphic/Logo": 0.10,
                           "Other": 0.04},
    "upper_garment_color": {"Black": 0.28, "White": 0.14, "Grey": 0.13,
                            "Blue": 0.12, "Brown": 0.07, "Red": 0.06,
                            "Green": 0.05, "Yellow": 0.03, "Orange": 0.02,
                            "Purple": 0.02, "Pink": 0.03, "Neon": 0.01,
                            "Other": 0.04},
    "upper_state": {"Long/Short Sleeve": 0.40, "Collared": 0.15,
                    "Hooded": 0.15, "Zipper Open/Closed": 0.15,
                    "Sleeveless": 0.03, "None": 0.12},
    "upper_fit_style": {"Regular": 0.58, "Loose/Oversized": 0.22,
                        "Tight/Fitted": 0.12, "Bulky (Padding)": 0.08},
    "torso_bag_type": {"None": 0.52, "Backpack": 0.22, "Shoulder Bag": 0.10,
                       "Crossbody Bag": 0.07, "Lanyard/ID": 0.06,
                       "Other": 0.03},
    "leg_visibility": {"Fully Visible": 0.55, "Partially Covered": 0.35,
                       "Hidden": 0.10},
    "lower_garment_type": {"Trousers": 0.30, "Jeans": 0.25,
                           "Sweatpants": 0.12, "Shorts": 0.10, "Skirt": 0.05,
                           "Leggings": 0.05, "Work/Cargo Pants": 0.10,
                           "Other": 0.03},
    "lower_garment_color": {"Black": 0.30, "Blue": 0.18, "Grey": 0.15,
                            "White": 0.07, "Brown": 0.08, "Green": 0.05,
                            "Red": 0.03, "Yellow": 0.02, "Orange": 0.02,
                            "Purple": 0.02, "Pink": 0.02, "Neon": 0.01,
                            "Other": 0.05},
    "lower_fit_style": {"Regular": 0.55, "Baggy/Loose": 0.18,
                        "Skinny/Tight": 0.20, "Short": 0.07},
    "shoe_type": {"Sneakers": 0.55, "Boots/Walker": 0.15, "Dress Shoes": 0.12,
                  "Sandal/Slipper": 0.08, "Other": 0.10},
    "shoe_color": {"Black": 0.35, "White": 0.25, "Grey": 0.10, "Blue": 0.06,
                   "Brown": 0.09, "Red": 0.03, "Green": 0.02, "Yellow": 0.01,
                   "Orange": 0.01, "Purple": 0.01, "Pink": 0.02, "Neon": 0.01,
                   "Other": 0.04},
    "items_held": {"None": 0.55, "Phone": 0.15, "Bag/Carrier": 0.08,
                   "Box": 0.04, "Notebook": 0.04, "Umbrella": 0.02,
                   "Drink": 0.04, "Tool": 0.03, "Paper": 0.03, "Other": 0.02},
    "visual_age_style": {"Young Adult": 0.45, "Mature": 0.30, "Elderly": 0.08,
                         "Child/Teen": 0.07, "Uniformed": 0.10},
    "body_shape": {"Normal": 0.60, "Slender": 0.25, "Heavy": 0.15},
    "body_features": {"None": 0.55, "Tall": 0.07, "Short": 0.06,
                      "Stocky": 0.06, "Lanky": 0.05, "Petite": 0.05,
                      "Potbelly": 0.04, "Muscular": 0.04, "Thick Thighs": 0.02,
                      "Obese": 0.01, "Stick-like Limbs": 0.01,
                      "Thin Wrists": 0.01, "Frail": 0.01, "Other": 0.02},
    "visual_gender": {"Male": 0.55, "Female": 0.45},
}

MULTI_SECOND_VALUE_P = 0.35
SELF_REENTRY_P = 0.05
REVISIT_DAMPING = 0.25
INTRA_ZONE_BIAS = 3.0

# Crowds contain look-alikes (uniforms, common outfits): a person either
# copies a shared archetype profile with light mutation or dresses
# independently. This drives realistic collision rates on the observable
# attributes, which the temporal track depends on.
ARCHETYPE_RATE = 0.92
ARCHETYPE_MUTATION = 0.015
PERSONS_PER_ARCHETYPE = 15
ARCHETYPE_ATTRS = (
    "hair_visibility", "hair_style", "hair_color", "headwear_type",
    "eyewear_type", "mask_state", "facial_hair", "upper_garment_type",
    "upper_color_layout", "upper_garment_color", "upper_state",
    "upper_fit_style", "torso_bag_type", "lower_garment_type",
    "lower_garment_color", "lower_fit_style", "shoe_type", "shoe_color",
    "items_held", "visual_age_style", "body_shape", "visual_gender",
)

# Some corridors are arterial: walk moves concentrate on them so their
# transition statistics reach the reliability threshold.
TRAVEL_POPULARITY_SPREAD = 0.8


def _stable_unit(*parts: str) -> float:
    """Deterministic hash of strings to [0, 1), stable across platforms."""
    h = hashlib.sha256(":".join(parts).encode("utf-8")).digest()
    return int.from_bytes(h[:8], "big") / 2**64


@dataclass(frozen=True)
class TransitPrior:
    """Per-edge transit-time prior used by the generator."""
    kind: str            # overlap | soft | travel | reentry
    model: str           # lognormal | triangular (travel only)
    m: float             # travel median parameter

    LOGNORMAL_SIGMA = 0.12

    def sample(self, rng: np.random.Generator) -> float:
        if self.kind == "overlap":
            return float(rng.triangular(-2.0, -0.3, 1.5))
        if self.kind == "soft":
            return float(rng.triangular(-1.5, 0.6, 3.0))
        if self.kind == "reentry":
            return float(rng.uniform(6.0, 30.0))
        if self.model == "lognormal":
            return float(self.m * np.exp(rng.normal(0.0, self.LOGNORMAL_SIGMA)))
        return float(rng.triangular(0.75 * self.m, self.m, 1.4 * self.m))

    def median(self) -> float:
        if self.kind == "overlap":
            return float(np.median([-2.0, -0.3, 1.5]))  # rough; unused
        if self.kind == "travel" and self.model == "lognormal":
            return self.m
        if self.kind == "travel":
            # triangular(a, c, b) with F(c) < 0.5: median on the right side
            a, c, b = 0.75 * self.m, self.m, 1.4 * self.m
            return b - np.sqrt((b - a) * (b - c) / 2.0)
        raise ValueError(self.kind)

    def support(self) -> tuple[float, float]:
        if self.kind == "overlap":
            return (-2.0, 1.5)
        if self.kind == "soft":
            return (-1.5, 3.0)
        if self.kind == "reentry":
            return (6.0, 30.0)
        if self.model == "lognormal":
            return (0.0, float("inf"))
        return (0.75 * self.m, 1.4 * self.m)


def _same_zone(topology: TopologyConfig, a: str, b: str) -> bool:
    for zone in topology.zone_names:
        if a in zone and b in zone:
            return True
    return False


def transit_prior(topology: TopologyConfig, from_cam: str, to_cam: str,
                  model: str = "lognormal") -> TransitPrior:
    pair = frozenset((from_cam, to_cam))
    if from_cam == to_cam:
        return TransitPrior(kind="reentry", model=model, m=0.0)
    if pair in topology.overlap_pairs:
        return TransitPrior(kind="overlap", model=model, m=0.0)
    if pair in topology.soft_pairs:
        return TransitPrior(kind="soft", model=model, m=0.0)
    m = topology.travel_medians.get((from_cam, to_cam))
    if m is None:
        u = _stable_unit(topology.name, from_cam, to_cam)
        if _same_zone(topology, from_cam, to_cam):
            m = 4.0 + 4.0 * u      # short hop within one area
        else:
            m = 8.0 + 12.0 * u     # cross-area artery
    return TransitPrior(kind="travel", model=model, m=m)


MARGINAL_FLATTEN = 0.45


def _marginal(marginals, adef):
    weights = marginals.get(adef.name)
    if weights is None:
        elig = [v for v in adef.values if v != UNCERTAIN]
        return elig, [1.0 / len(elig)] * len(elig)
    names = list(weights)
    total = sum(weights.values())
    u = 1.0 / len(names)
    return names, [
        (1.0 - MARGINAL_FLATTEN) * weights[v] / total + MARGINAL_FLATTEN * u
        for v in names
    ]


def _draw_value(rng, adef, names, probs):
    value = names[int(rng.choice(len(names), p=probs))]
    if adef.multi_select:
        chosen = {value}
        if value != "None" and rng.random() < MULTI_SECOND_VALUE_P:
            second = names[int(rng.choice(len(names), p=probs))]
            if second != "None":
                chosen.add(second)
        return tuple(sorted(chosen))
    return value


def _sample_archetypes(rng, schema, marginals, n: int) -> list[dict]:
    """Archetype outfits are drawn near-uniformly over values, so each
    cluster shares a combination that is rare in the rest of the gallery;
    rare shared traits are exactly what initial clues latch onto."""
    out = []
    for _ in range(n):
        profile = {}
        for adef in schema.attributes:
            if adef.name in ARCHETYPE_ATTRS:
                names, _ = _marginal(marginals, adef)
                flat = [1.0 / len(names)] * len(names)
                profile[adef.name] = _draw_value(rng, adef, names, flat)
        out.append(profile)
    return out


def _sample_attrs(rng, schema, marginals, uncertain_rate, archetypes):
    base = None
    if archetypes and rng.random() < ARCHETYPE_RATE:
        base = archetypes[int(rng.integers(0, len(archetypes)))]
    attrs = {}
    for adef in schema.attributes:
        names, probs = _marginal(marginals, adef)
        if rng.random() < uncertain_rate:
            value = (UNCERTAIN,) if adef.multi_select else UNCERTAIN
        elif (base is not None and adef.name in base
                and rng.random() >= ARCHETYPE_MUTATION):
            value = base[adef.name]
        else:
            value = _draw_value(rng, adef, names, probs)
        attrs[adef.name] = value
    return attrs


def _zone_lookup(topology: TopologyConfig) -> dict[str, frozenset]:
    return {c: zone for zone in topology.zone_names for c in zone}


def _edge_popularity(topology, a: str, b: str) -> float:
    pair = frozenset((a, b))
    if pair in topology.overlap_pairs or pair in topology.soft_pairs:
        return 1.0
    u = _stable_unit(topology.name, "pop", *sorted((a, b)))
    return 1.0 + TRAVEL_POPULARITY_SPREAD * u * u


def _walk(rng, topology, cam_zone, target_unique: int) -> list[str]:
    cams = topology.cameras
    cur = cams[int(rng.choice(len(cams)))]
    seq = [cur]
    seen = {cur}
    steps = 0
    max_steps = 4 * target_unique + 24
    while len(seen) < target_unique and steps < max_steps:
        steps += 1
        if rng.random() < SELF_REENTRY_P:
            seq.append(cur)
            continue
        neighbors = topology.walk_neighbors(cur)
        prev = seq[-2] if len(seq) >= 2 else None
        if len(neighbors) > 1 and prev in neighbors:
            # people rarely bounce straight back
            neighbors = tuple(n for n in neighbors if n != prev)
        if not neighbors:
            break
        weights = np.array([
            (INTRA_ZONE_BIAS if cam_zone[n] == cam_zone[cur] else 1.0)
            * _edge_popularity(topology, cur, n)
            * (REVISIT_DAMPING if n in seen else 1.0)
            for n in neighbors
        ])
        weights /= weights.sum()
        cur = neighbors[int(rng.choice(len(neighbors), p=weights))]
        seq.append(cur)
        seen.add(cur)
    return seq


def generate_world(cfg: WorldGenConfig) -> World:
    topology = load_topology(cfg.topology)
    schema = default_schema()
    marginals = dict(DEFAULT_MARGINALS)
    if cfg.attr_marginals:
        marginals.update(cfg.attr_marginals)
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    cam_zone = _zone_lookup(topology)
    n_arch = max(4, cfg.n_persons // PERSONS_PER_ARCHETYPE)
    archetypes = _sample_archetypes(rng, schema, marginals, n_arch)

    gallery = []
    trajectories = []
    for pid in range(cfg.n_persons):
        attrs = _sample_attrs(rng, schema, marginals, cfg.uncertain_rate,
                              archetypes)
        gallery.append(PersonRecord(id=pid, attrs=attrs))

        target_unique = int(np.clip(
            round(rng.normal(cfg.mean_cams_per_person, 1.3)), 3,
            len(topology.cameras),
        ))
        seq = _walk(rng, topology, cam_zone, target_unique)
        t = float(rng.uniform(0.0, 900.0))
        visits = []
        prev = None
        for cam in seq:
            if prev is not None:
                prior = transit_prior(topology, prev, cam,
                                      cfg.edge_time_model)
                t += prior.sample(rng)
            dwell = float(rng.uniform(25.0, 90.0))
            visits.append(Visit(camera=cam, enter=t, exit=t + dwell))
            t += dwell
            prev = cam
        visits.sort(key=lambda v: (v.enter, v.exit, v.camera))
        trajectories.append(Trajectory(person=pid, visits=tuple(visits)))

    world = World(
        schema=schema,
        gallery=tuple(gallery),
        trajectories=tuple(trajectories),
        cameras=topology.cameras,
        topology_name=topology.name,
    )
    validate_world(world)
    return world


# --- Anomaly injection -------------------------------------------------------

@dataclass(frozen=True)
class AnomalyPlan:
    c1: str
    c2: str
    t_ref: float
    reversals: tuple[tuple[int, float], ...]   # (person, target delta)
    slows: tuple[tuple[int, float], ...]


def reference_pair(world: World) -> tuple[str, str, float]:
    """Anchor sighting pair: the busiest directed non-self camera pair.

    Ties break lexicographically. The reference gap is the median transit
    over that pair's observations.
    """
    transitions = extract_transitions(world.trajectories)
    by_pair: dict[tuple[str, str], list[float]] = {}
    for t in transitions:
        if t.from_cam != t.to_cam and t.transit > 0:
            by_pair.setdefault(t.edge, []).append(t.transit)
    if not by_pair:
        raise InsufficientTransitions("world has no positive transitions")
    best = max(sorted(by_pair), key=lambda e: len(by_pair[e]))
    return best[0], best[1], float(np.median(by_pair[best]))


def plan_anomalies(world: World, n_time_reversals: int, n_slow_transits: int,
                   seed: int = 0) -> AnomalyPlan:
    c1, c2, t_ref = reference_pair(world)
    slow_base = max(300.0, 12.0 * t_ref)

    slow_eligible = []
    rev_eligible = []
    for traj in world.trajectories:
        at1 = [i for i, v in enumerate(traj.visits) if v.camera == c1]
        at2 = [i for i, v in enumerate(traj.visits) if v.camera == c2]
        if len(at1) != 1 or len(at2) != 1:
            continue
        i1, i2 = at1[0], at2[0]
        if i2 > i1 + 1:
            slow_eligible.append(traj.person)
        rev_eligible.append(traj.person)

    slows = tuple(
        (pid, slow_base + 20.0 * k)
        for k, pid in enumerate(slow_eligible[:n_slow_transits])
    )
    if len(slows) < n_slow_transits:
        raise InsufficientTransitions(
            f"need {n_slow_transits} slow-transit candidates, "
            f"found {len(slows)}"
        )
    taken = {pid for pid, _ in slows}
    rev_pool = [p for p in rev_eligible if p not in taken]
    reversals = tuple(
        (pid, -(30.0 + 7.0 * k))
        for k, pid in enumerate(rev_pool[:n_time_reversals])
    )
    if len(reversals) < n_time_reversals:
        raise InsufficientTransitions(
            f"need {n_time_reversals} time-reversal candidates, "
            f"found {len(reversals)}"
        )
    return AnomalyPlan(c1=c1, c2=c2, t_ref=t_ref, reversals=reversals,
                       slows=slows)


def _shift_suffix(traj: Trajectory, c2: str, delta_target: float,
                  c1: str) -> Trajectory:
    """Shift the visit at c2 (and everything after it) so the c1->c2 gap
    becomes delta_target."""
    visits = list(traj.visits)
    v1 = next(v for v in visits if v.camera == c1)
    v2 = next(v for v in visits if v.camera == c2)
    shift = (v1.exit + delta_target) - v2.enter
    out = []
    for v in visits:
        if v.enter >= v2.enter:
            out.append(Visit(camera=v.camera, enter=v.enter + shift,
                             exit=v.exit + shift))
        else:
            out.append(v)
    out.sort(key=lambda v: (v.enter, v.exit, v.camera))
    return Trajectory(person=traj.person, visits=tuple(out))


def inject_anomalies(world: World, n_time_reversals: int = 0,
                     n_slow_transits: int = 0, seed: int = 0) -> World:
    """Deterministically retime selected persons so they classify as
    TIME_REVERSAL / TOO_SLOW against the world's reference sighting pair.

    Returns a modified copy; the original world is untouched.
    """
    if n_time_reversals == 0 and n_slow_transits == 0:
        return world
    plan = plan_anomalies(world, n_time_reversals, n_slow_transits, seed)
    targets = {pid: delta for pid, delta in plan.reversals}
    targets.update({pid: delta for pid, delta in plan.slows})
    new_trajs = []
    for traj in world.trajectories:
        if traj.person in targets:
            new_trajs.append(
                _shift_suffix(traj, plan.c2, targets[traj.person], plan.c1)
            )
        else:
            new_trajs.append(traj)
    new_world = replace(world, trajectories=tuple(new_trajs))
    validate_world(new_world)
    return new_world
