"""Ground-truth task generation for the three search tracks.

Track 1 narrows a clue-filtered pool with greedy information-gain questions.
Track 2 anchors the target in a multi-camera zone and mixes zone-tree spatial
questions with attribute questions. Track 3 anchors a two-sighting transition
on the topology graph, eliminates temporally impossible candidates, then
disambiguates the feasible remainder by information gain.

Every accepted task terminates with exactly the target; that uniqueness is
the generator's core guarantee and is re-checked by the test suite.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import dialogue as dlg
from .schema import AttributeSchema, UNCERTAIN, value_key
from .sttg import (
    FeasReason,
    FeasStatus,
    Sttg,
    classify_feasibility,
    merge_trajectory_visits,
)
from .topology import TopologyConfig
from .world import PersonRecord, World

IG_ALPHA = 0.5
MAX_IG_TURNS = 10
MAX_TRACK2_TURNS = 6
SPATIAL_VS_ATTR = 0.5          # spatial wins when spatial_elim >= 0.5 * attr_elim
ZONE_WINDOW_S = 300.0
POOL_MIN, POOL_MAX = 5, 90
HARD_POOL = (30, 90)
BALANCED_POOL = (5, 30)
HARD_MODE_P = 0.35
PAIR_MIN_EDGE_COUNT = 20
PAIR_HIGH_N = 50               # "high sample count" bonus threshold
NEG_INF = float("-inf")

VAGUE_BUCKETS = (
    (0.0, 30.0, "almost at the same time"),
    (30.0, 120.0, "a moment later"),
    (120.0, 300.0, "a few minutes later"),
    # buckets past 300 s are artifact-defined, not from the source material
    (300.0, 900.0, "a while later"),
    (900.0, math.inf, "much later"),
)


def vaguify_time(delta: float, buckets=VAGUE_BUCKETS) -> str:
    """Map a transition gap to its vague phrase; intervals are closed-open,
    so an exact boundary lands in the bucket it opens."""
    if delta < 0:
        raise ValueError(f"negative gap {delta}")
    for lo, hi, phrase in buckets:
        if lo <= delta < hi:
            return phrase
    raise ValueError(f"no bucket covers gap {delta}")


# --- Saliency ---------------------------------------------------------------

def compute_saliency(gallery, schema: AttributeSchema) -> dict:
    """TF-IDF style saliency per (attribute, value): rarer values score
    higher, scaled by how often the attribute is validly observed.

    score = (1/freq(v)) * ln(N / valid_count(a)); valid counts exclude
    Uncertain and None. Natural log: saliency only ranks, so the base is
    order-irrelevant.
    """
    n = len(gallery)
    table: dict[tuple[str, str], float] = {}
    for adef in schema.attributes:
        freq: dict[str, int] = {}
        valid = 0
        for rec in gallery:
            key = value_key(rec.attrs[adef.name])
            if key in (UNCERTAIN, "None"):
                continue
            valid += 1
            freq[key] = freq.get(key, 0) + 1
        if valid == 0:
            continue
        idf = math.log(n / valid)
        for key, f in freq.items():
            table[(adef.name, key)] = idf / f
    return table


# --- Information gain --------------------------------------------------------

def ig_from_counts(counts: dict[str, int], alpha: float = IG_ALPHA) -> float:
    """Penalized entropy over a value histogram (Uncertain handled apart)."""
    total = sum(counts.values())
    if total == 0:
        return 0.0
    unc = counts.get(UNCERTAIN, 0)
    known = total - unc
    h = 0.0
    if known > 0:
        for key, c in counts.items():
            if key == UNCERTAIN or c == 0:
                continue
            p = c / known
            h -= p * math.log2(p)
    return h * (1.0 - alpha * unc / total)


def value_counts(attribute: str, candidates) -> dict[str, int]:
    counts: dict[str, int] = {}
    for rec in candidates:
        key = value_key(rec.attrs[attribute])
        counts[key] = counts.get(key, 0) + 1
    return counts


def information_gain(attribute: str, candidates, schema: AttributeSchema,
                     alpha: float = IG_ALPHA) -> float:
    """Penalized entropy score of one attribute over a candidate set;
    excluded attributes return -inf so they never win the argmax."""
    if schema.get(attribute).ig_excluded:
        return NEG_INF
    return ig_from_counts(value_counts(attribute, candidates), alpha)


def best_ig_attribute(candidates, schema: AttributeSchema, target=None,
                      skip=()) -> tuple[str | None, float]:
    """Greedy argmax over eligible attributes; lexicographic name tie-break.

    With a target given, attributes where the target's value is Uncertain are
    skipped: they cannot produce a usable witness answer.
    """
    best_attr, best_score = None, 0.0
    for name in sorted(schema.ig_attributes()):
        if name in skip:
            continue
        if target is not None and value_key(target.attrs[name]) == UNCERTAIN:
            continue
        score = information_gain(name, candidates, schema)
        if score > best_score:
            best_attr, best_score = name, score
    return best_attr, best_score


# --- Disambiguation steps ----------------------------------------------------

@dataclass(frozen=True)
class DisambiguationStep:
    kind: str                       # Attribute | Spatial | Temporal
    candidates_before: int
    candidates_after: int
    eliminated_ids: tuple[int, ...]
    attribute: str | None = None
    value: str | None = None        # canonical value key
    spatial_question: str | None = None
    spatial_answer: str | None = None


def simulate_ig_path(target: PersonRecord, pool, schema: AttributeSchema,
                     max_turns: int = MAX_IG_TURNS) -> list[DisambiguationStep]:
    """Greedy IG narrowing: ask the argmax attribute, keep candidates that
    match the target's value, stop at a singleton or the turn cap."""
    candidates = list(pool)
    steps: list[DisambiguationStep] = []
    asked: set[str] = set()
    for _ in range(max_turns):
        if len(candidates) <= 1:
            break
        attr, score = best_ig_attribute(candidates, schema, target=target,
                                        skip=asked)
        if attr is None or score <= 0.0:
            break
        asked.add(attr)
        tkey = value_key(target.attrs[attr])
        kept = [c for c in candidates if value_key(c.attrs[attr]) == tkey]
        eliminated = tuple(c.id for c in candidates
                           if value_key(c.attrs[attr]) != tkey)
        steps.append(DisambiguationStep(
            kind="Attribute",
            attribute=attr,
            value=tkey,
            candidates_before=len(candidates),
            candidates_after=len(kept),
            eliminated_ids=eliminated,
        ))
        candidates = kept
    return steps


def path_final_ids(pool_ids, steps) -> set[int]:
    remaining = set(pool_ids)
    for s in steps:
        remaining -= set(s.eliminated_ids)
    return remaining


# --- Clue selection ----------------------------------------------------------

def mode_for_target(pid: int) -> str:
    """Deterministic per-target difficulty mode (seed = id*1337 + 42)."""
    rng = np.random.Generator(np.random.PCG64(pid * 1337 + 42))
    return "Hard" if rng.random() < HARD_MODE_P else "Balanced"


def _clue_options(target: PersonRecord, pool, schema, saliency):
    opts = []
    for name in schema.clue_attributes():
        if schema.get(name).multi_select:
            continue
        key = value_key(target.attrs[name])
        if key in (UNCERTAIN, "None"):
            continue
        size = sum(1 for rec in pool
                   if value_key(rec.attrs[name]) == key)
        opts.append((name, key, size, saliency.get((name, key), 0.0)))
    return opts


def select_clue(target: PersonRecord, pool, saliency, mode: str,
                schema: AttributeSchema) -> tuple[str, str] | None:
    """Pick the initial clue per difficulty mode.

    Hard prefers common low-saliency clues with pools in [30, 90]; Balanced
    prefers salient clues with pools in [5, 30]. When nothing lands in the
    preferred window, fall back to any clue with a pool in [5, 90]. Ties
    break on (attribute, value).
    """
    opts = _clue_options(target, pool, schema, saliency)
    lo, hi = HARD_POOL if mode == "Hard" else BALANCED_POOL
    preferred = [o for o in opts if lo <= o[2] <= hi]
    candidates = preferred or [
        o for o in opts if POOL_MIN <= o[2] <= POOL_MAX
    ]
    if not candidates:
        return None
    if mode == "Hard":
        best = min(candidates, key=lambda o: (o[3], o[0], o[1]))
    else:
        best = min(candidates, key=lambda o: (-o[3], o[0], o[1]))
    return best[0], best[1]


# --- Difficulty --------------------------------------------------------------

def difficulty_base(c0_size: int, turns: int, r_u: float) -> float:
    """Weighted difficulty score with a short-path gating factor."""
    base = 0.45 * c0_size / 90.0 + 0.40 * turns / 10.0 + 0.15 * r_u
    if turns < 3:
        base *= 0.7
    return base


def assign_difficulty(scores) -> list[str]:
    """Global 33rd/67th percentile cuts with midpoint tie ranks; degenerate
    batches collapse to Medium."""
    n = len(scores)
    labels = []
    for s in scores:
        less = sum(1 for x in scores if x < s)
        equal = sum(1 for x in scores if x == s)
        pct = (less + 0.5 * equal) / n
        if pct < 1 / 3:
            labels.append("Easy")
        elif pct > 2 / 3:
            labels.append("Hard")
        else:
            labels.append("Medium")
    return labels


def uncertain_ratio(target: PersonRecord, schema: AttributeSchema) -> float:
    unc = sum(
        1 for a in schema.names
        if value_key(target.attrs[a]) == UNCERTAIN
    )
    return unc / len(schema.names)


# --- Task containers ---------------------------------------------------------

@dataclass(frozen=True)
class Track2Info:
    zone_id: str
    question: str
    answer: str
    target_camera: str
    candidate_cameras: dict[int, str]


@dataclass(frozen=True)
class Track3Info:
    c1: str
    c2: str
    t1: float
    t2: float
    delta: float
    vague_phrase: str
    verdicts: dict[int, tuple[str, str | None]]  # id -> (status, reason)


@dataclass(frozen=True)
class Task:
    track: int
    id: str
    scenario: str
    target: int
    clue: tuple[str, str]
    initial_candidates: tuple[int, ...]
    oracle_path: tuple[DisambiguationStep, ...]
    difficulty: str
    dialogue: tuple[tuple[str, str], ...] = ()
    opening_turns: int = 1          # dialogue entries visible before play
    path_answers: dict = field(default_factory=dict)  # attr -> rendered text
    track2: Track2Info | None = None
    track3: Track3Info | None = None

    @property
    def oracle_turns(self) -> int:
        return len(self.oracle_path)


# --- Dialogue rendering -------------------------------------------------------

def render_dialogue(task: Task, seed: int, opening_prefix: str = "") -> Task:
    """Attach deterministic template-rendered dialogue to an accepted task.

    The first `opening_turns` entries are the witness's initial statement and
    are the only dialogue exposed for interactive tracks; Track 1 exposes the
    whole conversation.
    """
    templates = dlg.load_templates()
    rng = dlg.dialogue_rng(seed, task.id)
    clue_attr, clue_value = task.clue
    opening = opening_prefix + dlg.clue_sentence(clue_attr, clue_value)
    lines: list[tuple[str, str]] = [("witness", opening)]
    path_answers: dict[str, str] = {}
    for step in task.oracle_path:
        if step.kind == "Attribute":
            lines.append(("agent", dlg.question_for(step.attribute)))
            answer = dlg.render_answer(rng, templates, step.value)
            lines.append(("witness", answer))
            path_answers[step.attribute] = answer
        elif step.kind == "Spatial":
            lines.append(("agent", step.spatial_question))
            lines.append(("witness", step.spatial_answer))
        # Temporal steps are tool calls, not conversation.
    return Task(
        track=task.track, id=task.id, scenario=task.scenario,
        target=task.target, clue=task.clue,
        initial_candidates=task.initial_candidates,
        oracle_path=task.oracle_path, difficulty=task.difficulty,
        dialogue=tuple(lines), opening_turns=1,
        path_answers=path_answers, track2=task.track2, track3=task.track3,
    )


# --- Track 1 ------------------------------------------------------------------

def gen_track1(world: World, seed: int = 42,
               scenario: str | None = None) -> list[Task]:
    scenario = scenario or world.topology_name
    schema = world.schema
    saliency = compute_saliency(world.gallery, schema)
    accepted = []
    for target in sorted(world.gallery, key=lambda p: p.id):
        mode = mode_for_target(target.id)
        clue = select_clue(target, world.gallery, saliency, mode, schema)
        if clue is None:
            continue
        attr, key = clue
        pool = [p for p in world.gallery
                if value_key(p.attrs[attr]) == key]
        if not POOL_MIN <= len(pool) <= POOL_MAX:
            continue
        steps = simulate_ig_path(target, sorted(pool, key=lambda p: p.id),
                                 schema)
        final = path_final_ids([p.id for p in pool], steps)
        if final != {target.id}:
            continue
        accepted.append((target, clue, pool, steps))

    scores = [
        difficulty_base(len(pool), len(steps),
                        uncertain_ratio(target, schema))
        for target, _, pool, steps in accepted
    ]
    labels = assign_difficulty(scores) if accepted else []

    tasks = []
    for (target, clue, pool, steps), label in zip(accepted, labels):
        task = Task(
            track=1,
            id=f"T1_{scenario}_{target.id:03d}",
            scenario=scenario,
            target=target.id,
            clue=clue,
            initial_candidates=tuple(sorted(p.id for p in pool)),
            oracle_path=tuple(steps),
            difficulty=label,
        )
        tasks.append(render_dialogue(task, seed))
    tasks.sort(key=lambda t: t.id)
    return tasks


# --- Track 2 ------------------------------------------------------------------

def _primary_visit(visits):
    return max(visits, key=lambda v: (v.exit - v.enter, -v.enter, v.camera))


def _zone_presences(world: World, zone_cams, w0: float, w1: float):
    """id -> camera of the longest-overlap zone visit inside the window."""
    out: dict[int, str] = {}
    for traj in world.trajectories:
        best = None
        for v in traj.visits:
            if v.camera not in zone_cams:
                continue
            overlap = min(v.exit, w1) - max(v.enter, w0)
            if overlap <= 0:
                continue
            item = (-overlap, v.enter, v.camera)
            if best is None or item < best:
                best = item
        if best is not None:
            out[traj.person] = best[2]
    return out


def gen_track2(world: World, sttg: Sttg, topology: TopologyConfig,
               seed: int = 42, scenario: str | None = None) -> list[Task]:
    scenario = scenario or world.topology_name
    schema = world.schema
    saliency = compute_saliency(world.gallery, schema)
    accepted = []
    for target in sorted(world.gallery, key=lambda p: p.id):
        traj = world.trajectory(target.id)
        if traj is None or not traj.visits:
            continue
        primary = _primary_visit(traj.visits)
        zone = sttg.zone_of(primary.camera)
        if len(zone.cameras) < 2 or zone.id not in topology.zone_trees:
            continue
        tree = topology.zone_trees[zone.id]
        target_option = tree.option_for(primary.camera)
        if target_option is None:
            continue
        w0 = primary.enter - ZONE_WINDOW_S
        w1 = primary.exit + ZONE_WINDOW_S
        presence = _zone_presences(world, zone.cameras, w0, w1)
        presence[target.id] = primary.camera
        zone_pool = [world.person(pid) for pid in sorted(presence)]
        clue = select_clue(target, zone_pool, saliency,
                           mode_for_target(target.id), schema)
        if clue is None:
            continue
        attr, key = clue
        candidates = [p for p in zone_pool
                      if value_key(p.attrs[attr]) == key]
        c0 = list(candidates)

        steps: list[DisambiguationStep] = []
        asked: set[str] = set()
        spatial_used = False
        for _ in range(MAX_TRACK2_TURNS):
            if len(candidates) <= 1:
                break
            attr_best, ig = best_ig_attribute(candidates, schema,
                                              target=target, skip=asked)
            attr_elim = 0
            if attr_best is not None and ig > 0.0:
                tkey = value_key(target.attrs[attr_best])
                attr_elim = sum(
                    1 for c in candidates
                    if value_key(c.attrs[attr_best]) != tkey
                )
            spatial_elim = 0
            if not spatial_used:
                spatial_elim = sum(
                    1 for c in candidates
                    if presence[c.id] not in target_option.cameras
                )
            spatial_possible = not spatial_used
            if (spatial_possible
                    and spatial_elim >= SPATIAL_VS_ATTR * attr_elim):
                kept = [c for c in candidates
                        if presence[c.id] in target_option.cameras]
                steps.append(DisambiguationStep(
                    kind="Spatial",
                    spatial_question=tree.question,
                    spatial_answer=target_option.phrase,
                    candidates_before=len(candidates),
                    candidates_after=len(kept),
                    eliminated_ids=tuple(
                        c.id for c in candidates
                        if presence[c.id] not in target_option.cameras
                    ),
                ))
                candidates = kept
                spatial_used = True
            elif attr_best is not None and attr_elim > 0:
                asked.add(attr_best)
                tkey = value_key(target.attrs[attr_best])
                kept = [c for c in candidates
                        if value_key(c.attrs[attr_best]) == tkey]
                steps.append(DisambiguationStep(
                    kind="Attribute",
                    attribute=attr_best,
                    value=tkey,
                    candidates_before=len(candidates),
                    candidates_after=len(kept),
                    eliminated_ids=tuple(
                        c.id for c in candidates
                        if value_key(c.attrs[attr_best]) != tkey
                    ),
                ))
                candidates = kept
            else:
                break

        spatial_turns = sum(1 for s in steps if s.kind == "Spatial")
        if [c.id for c in candidates] != [target.id] or spatial_turns < 1:
            continue
        if len(c0) <= 5 and len(steps) <= 2:
            label = "Easy"
        elif len(c0) <= 10 and len(steps) <= 4:
            label = "Medium"
        else:
            label = "Hard"
        info = Track2Info(
            zone_id=zone.id,
            question=tree.question,
            answer=target_option.phrase,
            target_camera=primary.camera,
            candidate_cameras={p.id: presence[p.id] for p in c0},
        )
        task = Task(
            track=2,
            id=f"T2_{scenario}_{target.id:03d}",
            scenario=scenario,
            target=target.id,
            clue=clue,
            initial_candidates=tuple(sorted(p.id for p in c0)),
            oracle_path=tuple(steps),
            difficulty=label,
            track2=info,
        )
        prefix = f"I saw someone around the {_decap(zone.name)}. "
        accepted.append(render_dialogue(task, seed, opening_prefix=prefix))

    accepted.sort(key=lambda t: t.id)
    return accepted


def _decap(name: str) -> str:
    return name[0].lower() + name[1:] if name else name


# --- Track 3 ------------------------------------------------------------------

def _score_pair(edge, transit: float) -> int:
    score = 10 if edge.edge_type == "TRAVEL" else 3
    if 10.0 <= edge.t_med <= 60.0:
        score += 5
    if edge.n >= PAIR_HIGH_N:
        score += 4
    if edge.t_min <= transit <= edge.t_max:
        score += 3
    return score


def _best_sighting_pair(traj, sttg: Sttg):
    visits = merge_trajectory_visits(traj)
    best = None
    for i, (a, b) in enumerate(zip(visits, visits[1:])):
        if a.camera == b.camera:
            continue
        edge = sttg.edge(a.camera, b.camera)
        if edge is None or edge.edge_type not in ("TRAVEL", "SOFT_ADJ"):
            continue
        transit = b.enter - a.exit
        if edge.n < PAIR_MIN_EDGE_COUNT or transit <= 0:
            continue
        item = (-_score_pair(edge, transit), i)
        if best is None or item < best[0]:
            best = (item, (a, b, edge))
    return None if best is None else best[1]


def gen_track3(world: World, sttg: Sttg, seed: int = 42,
               scenario: str | None = None,
               vague_buckets=VAGUE_BUCKETS) -> list[Task]:
    scenario = scenario or world.topology_name
    schema = world.schema
    saliency = compute_saliency(world.gallery, schema)
    tasks = []
    for target in sorted(world.gallery, key=lambda p: p.id):
        traj = world.trajectory(target.id)
        if traj is None:
            continue
        pair = _best_sighting_pair(traj, sttg)
        if pair is None:
            continue
        v1, v2, edge = pair
        c1, c2 = v1.camera, v2.camera
        t1, t2 = v1.exit, v2.enter
        delta = t2 - t1

        clue = select_clue(target, world.gallery, saliency,
                           mode_for_target(target.id), schema)
        if clue is None:
            continue
        attr, key = clue
        pool = [p for p in world.gallery
                if value_key(p.attrs[attr]) == key]
        if not POOL_MIN <= len(pool) <= POOL_MAX:
            continue

        verdicts: dict[int, tuple[str, str | None]] = {}
        feasible, impossible = [], []
        unknown = []
        for cand in sorted(pool, key=lambda p: p.id):
            verdict = classify_feasibility(
                world.trajectory(cand.id), c1, c2, delta, sttg
            )
            if verdict.status is FeasStatus.UNKNOWN:
                unknown.append(cand.id)  # excluded from ground truth
                continue
            reason = verdict.reason.value if verdict.reason else None
            verdicts[cand.id] = (verdict.status.value, reason)
            if verdict.status is FeasStatus.FEASIBLE:
                feasible.append(cand)
            else:
                impossible.append(cand.id)
        temporal_elims = sum(
            1 for status, reason in verdicts.values()
            if reason in (FeasReason.TIME_REVERSAL.value,
                          FeasReason.TOO_SLOW.value)
        )
        if temporal_elims < 1:
            continue
        if not any(p.id == target.id for p in feasible):
            continue

        c0_ids = tuple(sorted(verdicts))
        temporal_step = DisambiguationStep(
            kind="Temporal",
            candidates_before=len(c0_ids),
            candidates_after=len(feasible),
            eliminated_ids=tuple(sorted(impossible)),
        )
        ig_steps = simulate_ig_path(target, feasible, schema)
        final = path_final_ids([p.id for p in feasible], ig_steps)
        if final != {target.id}:
            continue

        steps = (temporal_step,) + tuple(ig_steps)
        if len(feasible) <= 6 and temporal_elims >= 2:
            label = "Easy"
        elif len(c0_ids) > 20 or len(steps) >= 4:
            label = "Hard"
        else:
            label = "Medium"
        info = Track3Info(
            c1=c1, c2=c2, t1=t1, t2=t2, delta=delta,
            vague_phrase=vaguify_time(delta, vague_buckets),
            verdicts=verdicts,
        )
        task = Task(
            track=3,
            id=f"T3_{scenario}_{target.id:03d}",
            scenario=scenario,
            target=target.id,
            clue=clue,
            initial_candidates=c0_ids,
            oracle_path=steps,
            difficulty=label,
            track3=info,
        )
        sub1 = sttg.nodes[c1].sub_area
        sub2 = sttg.nodes[c2].sub_area
        prefix = (f"I spotted them by {sub1}; {info.vague_phrase}, "
                  f"I saw them by {sub2}. ")
        tasks.append(render_dialogue(task, seed, opening_prefix=prefix))

    tasks.sort(key=lambda t: t.id)
    return tasks


# --- JSON ---------------------------------------------------------------------

def _step_to_json(s: DisambiguationStep) -> dict:
    return {
        "kind": s.kind,
        "attribute": s.attribute,
        "value": s.value,
        "spatial_question": s.spatial_question,
        "spatial_answer": s.spatial_answer,
        "candidates_before": s.candidates_before,
        "candidates_after": s.candidates_after,
        "eliminated_ids": list(s.eliminated_ids),
    }


def task_to_json(task: Task) -> dict:
    obj = {
        "track": task.track,
        "id": task.id,
        "scenario": task.scenario,
        "target": task.target,
        "clue": list(task.clue),
        "initial_candidates": list(task.initial_candidates),
        "oracle_path": [_step_to_json(s) for s in task.oracle_path],
        "oracle_turns": task.oracle_turns,
        "difficulty": task.difficulty,
        "dialogue": [list(line) for line in task.dialogue],
        "opening_turns": task.opening_turns,
        "path_answers": dict(sorted(task.path_answers.items())),
    }
    if task.track2 is not None:
        obj["track2"] = {
            "zone_id": task.track2.zone_id,
            "question": task.track2.question,
            "answer": task.track2.answer,
            "target_camera": task.track2.target_camera,
            "candidate_cameras": {
                str(k): v
                for k, v in sorted(task.track2.candidate_cameras.items())
            },
        }
    if task.track3 is not None:
        obj["track3"] = {
            "c1": task.track3.c1,
            "c2": task.track3.c2,
            "t1": task.track3.t1,
            "t2": task.track3.t2,
            "delta": task.track3.delta,
            "vague_phrase": task.track3.vague_phrase,
            "verdicts": {
                str(k): list(v)
                for k, v in sorted(task.track3.verdicts.items())
            },
        }
    return obj


def task_from_json(obj: dict) -> Task:
    steps = tuple(
        DisambiguationStep(
            kind=s["kind"],
            attribute=s["attribute"],
            value=s["value"],
            spatial_question=s["spatial_question"],
            spatial_answer=s["spatial_answer"],
            candidates_before=s["candidates_before"],
            candidates_after=s["candidates_after"],
            eliminated_ids=tuple(s["eliminated_ids"]),
        )
        for s in obj["oracle_path"]
    )
    track2 = None
    if "track2" in obj:
        t2 = obj["track2"]
        track2 = Track2Info(
            zone_id=t2["zone_id"], question=t2["question"],
            answer=t2["answer"], target_camera=t2["target_camera"],
            candidate_cameras={
                int(k): v for k, v in t2["candidate_cameras"].items()
            },
        )
    track3 = None
    if "track3" in obj:
        t3 = obj["track3"]
        track3 = Track3Info(
            c1=t3["c1"], c2=t3["c2"], t1=t3["t1"], t2=t3["t2"],
            delta=t3["delta"], vague_phrase=t3["vague_phrase"],
            verdicts={
                int(k): (v[0], v[1]) for k, v in t3["verdicts"].items()
            },
        )
    return Task(
        track=obj["track"], id=obj["id"], scenario=obj["scenario"],
        target=obj["target"], clue=(obj["clue"][0], obj["clue"][1]),
        initial_candidates=tuple(obj["initial_candidates"]),
        oracle_path=steps, difficulty=obj["difficulty"],
        dialogue=tuple((s, t) for s, t in obj["dialogue"]),
        opening_turns=obj["opening_turns"],
        path_answers=dict(obj["path_answers"]),
        track2=track2, track3=track3,
    )


def save_tasks(tasks, path) -> None:
    payload = [task_to_json(t) for t in tasks]
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, sort_keys=True, separators=(",", ":"))
        f.write("\n")


def load_tasks(path) -> list[Task]:
    with open(path, "r", encoding="utf-8") as f:
        payload = json.load(f)
    return [task_from_json(obj) for obj in payload]
