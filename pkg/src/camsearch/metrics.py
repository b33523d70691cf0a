"""Scoring: turn-weighted success, budgeted success rates, reduction curves.

Turn-weighted success per transcript is s * tau_star / max(tau, tau_star):
1.0 when the agent matches the oracle turn count, shrinking as extra turns
pile up, zero for wrong or timed-out sessions.
"""

from __future__ import annotations

from dataclasses import dataclass

from .env import TURN_BUDGET, Transcript


class EmptyBatch(Exception):
    pass


def tws_term(t: Transcript) -> float:
    if t.outcome != "correct":
        return 0.0
    return t.oracle_turns / max(t.turns_used, t.oracle_turns, 1)


def tws(transcripts) -> float:
    ts = list(transcripts)
    if not ts:
        raise EmptyBatch("no transcripts")
    return sum(tws_term(t) for t in ts) / len(ts)


def top1(transcripts) -> float:
    ts = list(transcripts)
    if not ts:
        raise EmptyBatch("no transcripts")
    return sum(1 for t in ts if t.outcome == "correct") / len(ts)


def sr_at(transcripts, T: int) -> float:
    """Fraction of sessions correct within a budget of T turns."""
    if not 1 <= T <= TURN_BUDGET:
        raise ValueError(f"T must be in [1, {TURN_BUDGET}], got {T}")
    ts = list(transcripts)
    if not ts:
        raise EmptyBatch("no transcripts")
    hits = sum(1 for t in ts
               if t.outcome == "correct" and t.turns_used <= T)
    return hits / len(ts)


def sr5_rank(transcripts) -> float:
    """Fraction of sessions whose top-5 ranking contains the target; falls
    back to exact-prediction correctness when no ranking was recorded."""
    ts = list(transcripts)
    if not ts:
        raise EmptyBatch("no transcripts")
    hits = 0
    for t in ts:
        if t.ranking is not None:
            hits += t.target in t.ranking[:5]
        else:
            hits += t.outcome == "correct"
    return hits / len(ts)


def auc_crr(t: Transcript) -> float:
    """Area under the candidate-reduction curve over the first tau_star
    turns; outcome-independent."""
    tau_star = t.oracle_turns
    if tau_star < 1:
        return 0.0
    if len(t.trace) < tau_star:
        raise ValueError("trace shorter than the oracle turn count")
    c0 = t.initial_candidates
    if c0 == 0:
        return 0.0
    return sum(1.0 - t.trace[i] / c0 for i in range(tau_star)) / tau_star


def ssrr(t: Transcript) -> float:
    """Mean per-turn reduction fraction over the turns actually used."""
    counts = [t.initial_candidates] + list(t.trace[:t.turns_used])
    rates = [
        1.0 - b / a
        for a, b in zip(counts, counts[1:])
        if a > 0
    ]
    return sum(rates) / len(rates) if rates else 0.0


def avg_turns_success(transcripts) -> float | None:
    turns = [t.turns_used for t in transcripts if t.outcome == "correct"]
    return sum(turns) / len(turns) if turns else None


@dataclass(frozen=True)
class Report:
    track: int
    n: int
    tws: float
    top1: float
    sr5: float
    sr_at: tuple[float, ...]        # SR@1 .. SR@20
    avg_turns_success: float | None
    auc_crr: float
    ssrr: float
    premature: int
    timeout_rate: float
    over_filter_rate: float
    redundant_rate: float
    wrong_tool: int


def aggregate(transcripts) -> Report:
    ts = sorted(transcripts, key=lambda t: t.task_id)
    if not ts:
        raise EmptyBatch("no transcripts")
    n = len(ts)
    tracks = {t.track for t in ts}
    track = tracks.pop() if len(tracks) == 1 else 0
    return Report(
        track=track,
        n=n,
        tws=tws(ts),
        top1=top1(ts),
        sr5=sr5_rank(ts),
        sr_at=tuple(sr_at(ts, T) for T in range(1, TURN_BUDGET + 1)),
        avg_turns_success=avg_turns_success(ts),
        auc_crr=sum(auc_crr(t) for t in ts) / n,
        ssrr=sum(ssrr(t) for t in ts) / n,
        premature=sum(t.counters.get("premature", 0) for t in ts),
        timeout_rate=sum(1 for t in ts if t.outcome == "timeout") / n,
        over_filter_rate=sum(
            1 for t in ts if t.counters.get("over_filter", 0) > 0
        ) / n,
        redundant_rate=sum(
            1 for t in ts if t.counters.get("redundant_q", 0) > 0
        ) / n,
        wrong_tool=sum(t.counters.get("wrong_tool", 0) for t in ts),
    )


def report_to_json(report: Report) -> dict:
    return {
        "track": report.track,
        "n": report.n,
        "tws": report.tws,
        "top1": report.top1,
        "sr5": report.sr5,
        "sr_at": list(report.sr_at),
        "avg_turns_success": report.avg_turns_success,
        "auc_crr": report.auc_crr,
        "ssrr": report.ssrr,
        "premature": report.premature,
        "timeout_rate": report.timeout_rate,
        "over_filter_rate": report.over_filter_rate,
        "redundant_rate": report.redundant_rate,
        "wrong_tool": report.wrong_tool,
    }


def transcript_to_json(t: Transcript) -> dict:
    return {
        "task_id": t.task_id,
        "track": t.track,
        "outcome": t.outcome,
        "turns_used": t.turns_used,
        "oracle_turns": t.oracle_turns,
        "initial_candidates": t.initial_candidates,
        "trace": list(t.trace),
        "counters": dict(sorted(t.counters.items())),
        "predicted": t.predicted,
        "ranking": list(t.ranking) if t.ranking is not None else None,
        "target": t.target,
        "actions": list(t.actions),
    }


def transcript_from_json(obj: dict) -> Transcript:
    return Transcript(
        task_id=obj["task_id"],
        track=obj["track"],
        outcome=obj["outcome"],
        turns_used=obj["turns_used"],
        oracle_turns=obj["oracle_turns"],
        initial_candidates=obj["initial_candidates"],
        trace=tuple(obj["trace"]),
        counters=dict(obj["counters"]),
        predicted=obj["predicted"],
        ranking=tuple(obj["ranking"]) if obj["ranking"] is not None else None,
        target=obj["target"],
        actions=tuple(obj.get("actions", ())),
    )
