"""Deterministic reference agents.

The oracle replays the stored ground-truth path. The greedy agent runs the
analyst/planner/interviewer/interpreter loop without any language model:
it recomputes information gain from gallery histograms, asks the witness,
parses the templated reply, and filters. Variants swap the planner for a
seeded random ordering or a fixed schema ordering; the temporal tool can be
disabled for ablations.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import dialogue as dlg
from .env import Action, Environment, SessionState, Transcript
from .schema import AttributeSchema, UNCERTAIN
from .tasks import Task, ig_from_counts

UNCERTAIN_SENTINEL = "UNCERTAIN"
MAX_LOOPS = 80


def parse_witness_response(text: str, attribute: str,
                           schema: AttributeSchema):
    """Map a witness reply back to a canonical value key.

    Returns the value key, UNCERTAIN_SENTINEL for the stock uncertain reply,
    or None when nothing matches (parse failure). Matching is
    case-insensitive; the longest canonical value wins, which disambiguates
    values that are substrings of others. Multi-select attributes collect
    every mentioned value.
    """
    if text.strip() == dlg.UNCERTAIN_REPLY:
        return UNCERTAIN_SENTINEL
    adef = schema.get(attribute)
    lowered = text.lower()
    matches = [v for v in adef.values
               if v != UNCERTAIN and v.lower() in lowered]
    if not matches:
        return None
    if adef.multi_select:
        chosen = set(matches)
        # drop values that only appear as substrings of a longer match
        final = {
            v for v in chosen
            if not any(w != v and v.lower() in w.lower() for w in chosen)
        }
        return ", ".join(sorted(final))
    return max(matches, key=len)


def _predict(env: Environment, session: SessionState,
             prediction: int, remaining: list[int]):
    ranking = [prediction] + [pid for pid in sorted(remaining)
                              if pid != prediction]
    return env.step(session, Action("T8", {
        "prediction": prediction, "ranking": ranking[:5],
    }))


def _remaining_ids(env: Environment, session: SessionState) -> list[int]:
    obs = env.step(session, Action("T2"))
    return [rec["id"] for rec in obs.payload["records"]]


# --- Oracle -------------------------------------------------------------------

def run_oracle(env: Environment, task: Task, seed: int = 0) -> Transcript:
    """Replay the stored disambiguation path; always ends correct in the
    oracle turn count."""
    session = env.create_session(task.id, seed)
    for step in task.oracle_path:
        if step.kind == "Temporal":
            env.step(session, Action("T5"))
        elif step.kind == "Spatial":
            env.step(session, Action("T4", {"query": "spatial"}))
            env.step(session, Action("T7", {
                "cameras": [task.track2.target_camera],
            }))
        else:
            if task.track != 1:
                env.step(session, Action(
                    "T4", {"query": "attribute", "attribute": step.attribute}
                ))
            env.step(session, Action("T6", {
                "attribute": step.attribute, "value": step.value,
            }))
        if session.done:
            break
    if not session.done:
        final = set(task.initial_candidates)
        for step in task.oracle_path:
            final -= set(step.eliminated_ids)
        remaining = sorted(final)
        prediction = remaining[0] if remaining else \
            min(task.initial_candidates)
        _predict(env, session, prediction, remaining)
    return env.transcript(session)


# --- Greedy loop and its planner variants ---------------------------------------

@dataclass(frozen=True)
class AgentConfig:
    kind: str = "GreedyIG"          # GreedyIG | RandomOrder | RuleBased
    seed: int = 0
    use_temporal: bool = True
    use_spatial: bool = True
    spatial_rule_threshold: float = 0.5


def _planner_order(cfg: AgentConfig, schema: AttributeSchema) -> list[str]:
    attrs = list(schema.ig_attributes())
    if cfg.kind == "RandomOrder":
        rng = np.random.Generator(np.random.PCG64(cfg.seed))
        rng.shuffle(attrs)
    return attrs


def _expected_elims(counts: dict[str, int], total: int) -> float:
    """Expected candidates removed by filtering on this attribute, assuming
    the target is a uniformly random candidate."""
    known = sum(c for k, c in counts.items() if k != UNCERTAIN)
    if known == 0:
        return 0.0
    expected_kept = sum(c * c for k, c in counts.items()
                        if k != UNCERTAIN) / known
    return total - expected_kept


def run_agent(env: Environment, task: Task, cfg: AgentConfig) -> Transcript:
    if task.track == 1:
        return _run_track1(env, task, cfg)
    return _run_interactive(env, task, cfg)


def _run_track1(env: Environment, task: Task, cfg: AgentConfig) -> Transcript:
    """Parse the provided dialogue, apply the filters, predict."""
    session = env.create_session(task.id, cfg.seed)
    view = env.task_view(task)
    lines = view["dialogue"]
    pending_attr = None
    for speaker, text in lines:
        if speaker == "agent":
            pending_attr = dlg.attribute_from_question(text)
            continue
        if pending_attr is None:
            continue
        value = parse_witness_response(text, pending_attr, env.world.schema)
        if value not in (None, UNCERTAIN_SENTINEL):
            env.step(session, Action("T6", {
                "attribute": pending_attr, "value": value,
            }))
        pending_attr = None
    remaining = _remaining_ids(env, session)
    prediction = min(remaining) if remaining else min(task.initial_candidates)
    _predict(env, session, prediction, remaining)
    return env.transcript(session)


def _run_interactive(env: Environment, task: Task,
                     cfg: AgentConfig) -> Transcript:
    session = env.create_session(task.id, cfg.seed)
    schema = env.world.schema
    order = _planner_order(cfg, schema)
    exhausted: set[str] = set()
    spatial_left = cfg.use_spatial and task.track == 2

    for _ in range(MAX_LOOPS):
        if session.done:
            break
        if (task.track == 3 and cfg.use_temporal
                and not session.temporal_check_done):
            env.step(session, Action("T5"))
            continue

        obs = env.step(session, Action("T1"))
        dists = obs.payload["distributions"]
        total = obs.payload["count"]
        if total <= 1:
            remaining = _remaining_ids(env, session)
            prediction = remaining[0] if remaining else \
                min(task.initial_candidates)
            _predict(env, session, prediction, remaining)
            break

        attr, attr_score, attr_elim = None, 0.0, 0.0
        for name in order:
            if name in exhausted:
                continue
            counts = dists[name]
            score = ig_from_counts(counts)
            if cfg.kind == "GreedyIG":
                if score > attr_score:
                    attr, attr_score = name, score
                    attr_elim = _expected_elims(counts, total)
            else:
                # fixed or shuffled ordering: first informative attribute
                if score > 0.0:
                    attr, attr_score = name, score
                    attr_elim = _expected_elims(counts, total)
                    break

        spatial_elim = 0.0
        options = None
        if spatial_left:
            zobs = env.step(session, Action("T3"))
            options = zobs.payload["options"]
            kept = sum(o["candidate_count"] ** 2 for o in options)
            spatial_elim = total - kept / total if total else 0.0

        if (spatial_left and options
                and spatial_elim >= cfg.spatial_rule_threshold * attr_elim):
            obs = env.step(session, Action("T4", {"query": "spatial"}))
            spatial_left = False
            if session.done:
                break
            reply = obs.payload["reply"]
            cameras = None
            for opt in options:
                if opt["phrase"].lower() == reply.strip().lower():
                    cameras = opt["cameras"]
            if cameras is not None:
                env.step(session, Action("T7", {"cameras": cameras}))
            continue

        if attr is None:
            remaining = _remaining_ids(env, session)
            prediction = min(remaining) if remaining else \
                min(task.initial_candidates)
            _predict(env, session, prediction, remaining)
            break

        obs = env.step(session, Action("T4", {
            "query": "attribute", "attribute": attr,
        }))
        exhausted.add(attr)
        if session.done:
            break
        value = parse_witness_response(obs.payload["reply"], attr, schema)
        if value in (None, UNCERTAIN_SENTINEL):
            continue
        env.step(session, Action("T6", {"attribute": attr, "value": value}))

    if not session.done:
        remaining = _remaining_ids(env, session)
        prediction = min(remaining) if remaining else \
            min(task.initial_candidates)
        _predict(env, session, prediction, remaining)
    return env.transcript(session)


def run_greedy_ig(env, task, cfg: AgentConfig | None = None) -> Transcript:
    return run_agent(env, task, cfg or AgentConfig(kind="GreedyIG"))


def run_random_order(env, task, seed: int = 0) -> Transcript:
    return run_agent(env, task, AgentConfig(kind="RandomOrder", seed=seed))


def run_rule_based(env, task, seed: int = 0) -> Transcript:
    return run_agent(env, task, AgentConfig(kind="RuleBased", seed=seed))


AGENT_RUNNERS = {
    "oracle": lambda env, task, seed: run_oracle(env, task, seed),
    "greedy": lambda env, task, seed: run_agent(
        env, task, AgentConfig(kind="GreedyIG", seed=seed)),
    "greedy-no-temporal": lambda env, task, seed: run_agent(
        env, task, AgentConfig(kind="GreedyIG", seed=seed,
                               use_temporal=False)),
    "random": lambda env, task, seed: run_random_order(env, task, seed),
    "rule": lambda env, task, seed: run_rule_based(env, task, seed),
}


def run_batch(env: Environment, tasks, agent: str, seed: int = 0,
              jobs: int = 1) -> list[Transcript]:
    runner = AGENT_RUNNERS[agent]
    ordered = sorted(tasks, key=lambda t: t.id)
    if jobs <= 1:
        results = [runner(env, t, seed) for t in ordered]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda t: runner(env, t, seed), ordered))
    return sorted(results, key=lambda tr: tr.task_id)
