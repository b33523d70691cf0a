"""Evaluation environment: session controller, tool registry, state manager.

Eight tools: gallery analysis (T1 distributions, T2 records, T3 zone
structure), interaction (T4 witness, T5 temporal check), and actions
(T6/T7 filters, T8 predict). Only T4 and T5 consume the 20-turn budget;
analysis and filtering are free, which makes the stored oracle turn counts
exactly achievable. Sessions are deterministic: same task, seed, and action
sequence always yield the same observations.

The environment never reveals the target, the oracle path, or which
attributes the witness can answer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .schema import value_key
from .tasks import Task, value_counts
from .topology import TopologyConfig
from .witness import Witness, WitnessConfig
from .world import World

TURN_BUDGET = 20

ALL_TOOLS = ("T1", "T2", "T3", "T4", "T5", "T6", "T7", "T8")

_AVAILABILITY = {
    1: frozenset({"T1", "T2", "T6", "T8"}),
    2: frozenset({"T1", "T2", "T3", "T4", "T6", "T7", "T8"}),
    3: frozenset({"T1", "T2", "T3", "T4", "T5", "T6", "T8"}),
}


def tool_availability(track: int) -> frozenset[str]:
    return _AVAILABILITY[track]


class MalformedArgs(Exception):
    pass


@dataclass(frozen=True)
class Action:
    tool: str
    args: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Observation:
    payload: object
    candidates_remaining: int
    turns_used: int
    done: bool
    outcome: str | None = None   # correct | wrong | timeout


@dataclass
class SessionState:
    task: Task
    candidates: list[int]
    witness: Witness
    turns_used: int = 0
    budget: int = TURN_BUDGET
    done: bool = False
    outcome: str | None = None
    predicted: int | None = None
    ranking: tuple[int, ...] | None = None
    spatial_ask_used: bool = False
    temporal_check_done: bool = False
    asked_attributes: set = field(default_factory=set)
    counters: dict = field(default_factory=lambda: {
        "over_filter": 0, "redundant_q": 0, "wrong_tool": 0, "premature": 0,
    })
    dialogue_log: list = field(default_factory=list)
    actions_log: list = field(default_factory=list)
    trace: dict = field(default_factory=dict)   # turn -> candidate count

    def record_count(self):
        if self.turns_used > 0:
            self.trace[self.turns_used] = len(self.candidates)


@dataclass(frozen=True)
class Transcript:
    task_id: str
    track: int
    outcome: str
    turns_used: int
    oracle_turns: int
    initial_candidates: int
    trace: tuple[int, ...]          # candidate count after each turn, padded
    counters: dict
    predicted: int | None
    ranking: tuple[int, ...] | None
    target: int
    actions: tuple[str, ...] = ()


class Environment:
    """Hosts sessions over one world and its task set."""

    def __init__(self, world: World, tasks, topology: TopologyConfig | None
                 = None, witness_config: WitnessConfig | None = None):
        self.world = world
        self.tasks = {t.id: t for t in tasks}
        self.topology = topology
        self.witness_config = witness_config or WitnessConfig()

    def task_view(self, task: Task) -> dict:
        """What an agent may see: no target, no path, no observability set."""
        if task.track == 1:
            dialogue = list(task.dialogue)
        else:
            dialogue = list(task.dialogue[:task.opening_turns])
        return {
            "task_id": task.id,
            "track": task.track,
            "scenario": task.scenario,
            "dialogue": [list(line) for line in dialogue],
            "candidate_count": len(task.initial_candidates),
            "turn_budget": TURN_BUDGET,
        }

    def create_session(self, task_id: str, seed: int = 0) -> SessionState:
        if task_id not in self.tasks:
            raise KeyError(f"unknown task {task_id!r}")
        task = self.tasks[task_id]
        witness = Witness(
            task=task,
            target=self.world.person(task.target),
            schema=self.world.schema,
            config=self.witness_config,
        )
        return SessionState(
            task=task,
            candidates=sorted(task.initial_candidates),
            witness=witness,
        )

    # -- tool implementations ------------------------------------------------

    def step(self, session: SessionState, action: Action) -> Observation:
        if session.done:
            raise RuntimeError("session is finished")
        task = session.task
        session.actions_log.append(action.tool)

        if action.tool not in _AVAILABILITY[task.track]:
            session.counters["wrong_tool"] += 1
            return self._obs(session, {"error": "wrong_tool",
                                       "tool": action.tool})
        try:
            payload = self._dispatch(session, action)
        except MalformedArgs as e:
            return self._obs(session, {"error": "malformed_args",
                                       "detail": str(e)})
        session.record_count()
        if (not session.done and session.turns_used >= session.budget):
            session.done = True
            session.outcome = "timeout"
        return self._obs(session, payload)

    def _obs(self, session: SessionState, payload) -> Observation:
        return Observation(
            payload=payload,
            candidates_remaining=len(session.candidates),
            turns_used=session.turns_used,
            done=session.done,
            outcome=session.outcome,
        )

    def _dispatch(self, session: SessionState, action: Action):
        return getattr(self, "_tool_" + action.tool.lower())(session,
                                                             action.args)

    def _candidate_records(self, session):
        return [self.world.person(pid) for pid in session.candidates]

    def _tool_t1(self, session, args):
        records = self._candidate_records(session)
        return {
            "distributions": {
                adef.name: dict(sorted(
                    value_counts(adef.name, records).items()
                ))
                for adef in self.world.schema.attributes
            },
            "count": len(records),
        }

    def _tool_t2(self, session, args):
        return {
            "records": [
                {
                    "id": rec.id,
                    "attrs": {
                        k: (list(v) if isinstance(v, tuple) else v)
                        for k, v in sorted(rec.attrs.items())
                    },
                }
                for rec in self._candidate_records(session)
            ]
        }

    def _tool_t3(self, session, args):
        task = session.task
        if task.track == 2 and task.track2 is not None and \
                self.topology is not None:
            tree = self.topology.zone_trees[task.track2.zone_id]
            cams = task.track2.candidate_cameras
            options = []
            for opt in tree.options:
                n = sum(1 for pid in session.candidates
                        if cams.get(pid) in opt.cameras)
                options.append({
                    "cameras": list(opt.cameras),
                    "phrase": opt.phrase,
                    "candidate_count": n,
                })
            return {"zone": task.track2.zone_id, "question": tree.question,
                    "options": options}
        return {"zone": None, "question": None, "options": []}

    def _tool_t4(self, session, args):
        query = args.get("query", "attribute")
        if query == "spatial":
            if session.task.track != 2:
                session.counters["wrong_tool"] += 1
                return {"error": "wrong_tool", "detail": "spatial ask"}
            session.turns_used += 1
            if session.spatial_ask_used:
                session.counters["redundant_q"] += 1
            reply, informative = session.witness.respond_spatial()
            session.spatial_ask_used = True
            session.dialogue_log.append(("witness", reply))
            return {"reply": reply, "informative": informative}
        attribute = args.get("attribute")
        if not attribute or attribute not in self.world.schema:
            raise MalformedArgs(f"bad attribute {attribute!r}")
        session.turns_used += 1
        if attribute in session.asked_attributes:
            session.counters["redundant_q"] += 1
        session.asked_attributes.add(attribute)
        reply = session.witness.respond_attribute(attribute)
        session.dialogue_log.append(("witness", reply))
        return {"reply": reply}

    def _tool_t5(self, session, args):
        task = session.task
        if task.track3 is None:
            raise MalformedArgs("task has no sighting pair")
        session.turns_used += 1
        if session.temporal_check_done:
            session.counters["redundant_q"] += 1
        session.temporal_check_done = True
        verdicts = task.track3.verdicts
        result = {}
        kept = []
        for pid in session.candidates:
            status, reason = verdicts.get(pid, ("UNKNOWN", None))
            result[pid] = {"status": status, "reason": reason}
            if status != "IMPOSSIBLE":
                kept.append(pid)
        self._apply_filter(session, kept)
        return {
            "verdicts": {str(pid): result[pid] for pid in sorted(result)},
            "remaining": len(session.candidates),
        }

    def _tool_t6(self, session, args):
        attribute = args.get("attribute")
        value = args.get("value")
        if not attribute or attribute not in self.world.schema:
            raise MalformedArgs(f"bad attribute {attribute!r}")
        if not isinstance(value, str):
            raise MalformedArgs("value must be a string")
        kept = [
            pid for pid in session.candidates
            if value_key(self.world.person(pid).attrs[attribute]) == value
        ]
        removed = len(session.candidates) - len(kept)
        self._apply_filter(session, kept)
        return {"removed": removed, "remaining": len(kept)}

    def _tool_t7(self, session, args):
        task = session.task
        if task.track2 is None:
            raise MalformedArgs("task has no location data")
        cameras = args.get("cameras")
        if not isinstance(cameras, list) or not all(
                isinstance(c, str) for c in cameras):
            raise MalformedArgs("cameras must be a list of ids")
        cams = set(cameras)
        placed = task.track2.candidate_cameras
        kept = [pid for pid in session.candidates
                if placed.get(pid) in cams]
        removed = len(session.candidates) - len(kept)
        self._apply_filter(session, kept)
        return {"removed": removed, "remaining": len(kept)}

    def _tool_t8(self, session, args):
        prediction = args.get("prediction")
        if not isinstance(prediction, int):
            raise MalformedArgs("prediction must be a person id")
        ranking = args.get("ranking")
        if ranking is not None:
            if (not isinstance(ranking, list)
                    or not all(isinstance(i, int) for i in ranking)):
                raise MalformedArgs("ranking must be a list of ids")
            session.ranking = tuple(ranking[:5])
        session.predicted = prediction
        correct = prediction == session.task.target
        if not correct and len(session.candidates) > 1:
            session.counters["premature"] += 1
        session.done = True
        session.outcome = "correct" if correct else "wrong"
        return {"outcome": session.outcome}

    def _apply_filter(self, session: SessionState, kept: list[int]) -> None:
        if (session.task.target in session.candidates
                and session.task.target not in kept):
            session.counters["over_filter"] += 1
        session.candidates = kept

    # -- transcripts ----------------------------------------------------------

    def transcript(self, session: SessionState) -> Transcript:
        if not session.done:
            raise RuntimeError("session still running")
        task = session.task
        final = len(session.candidates)
        # count after each reached turn; final count carries forward
        filled = [
            session.trace[t] if t <= session.turns_used else final
            for t in range(1, TURN_BUDGET + 1)
        ]
        return Transcript(
            task_id=task.id,
            track=task.track,
            outcome=session.outcome,
            turns_used=session.turns_used,
            oracle_turns=task.oracle_turns,
            initial_candidates=len(task.initial_candidates),
            trace=tuple(filled),
            counters=dict(session.counters),
            predicted=session.predicted,
            ranking=session.ranking,
            target=task.target,
            actions=tuple(session.actions_log),
        )
