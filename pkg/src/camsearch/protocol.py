"""Wire protocol for out-of-process agents: newline-delimited JSON.

One message per line, UTF-8, LF-terminated, canonical encoding (sorted keys,
ASCII escapes, compact separators) so both sides can compare bytes. Message
kinds: hello, task_offer, action, observation, result. The full byte-level
contract lives in docs/wire_protocol.md; tests/data/protocol_golden.jsonl is
the shared golden corpus.
"""

from __future__ import annotations

import json

PROTOCOL_VERSION = 1
KINDS = ("hello", "task_offer", "action", "observation", "result")


class ProtocolError(Exception):
    pass


def encode(msg: dict) -> bytes:
    return json.dumps(
        msg, sort_keys=True, ensure_ascii=True, separators=(",", ":")
    ).encode("utf-8") + b"\n"


def decode(line: bytes | str) -> dict:
    if isinstance(line, bytes):
        line = line.decode("utf-8")
    try:
        msg = json.loads(line)
    except json.JSONDecodeError as e:
        raise ProtocolError(f"invalid JSON: {e}") from e
    validate_message(msg)
    return msg


def _require(msg: dict, *fields: str) -> None:
    for f in fields:
        if f not in msg:
            raise ProtocolError(
                f"{msg.get('kind', '?')} message missing field {f!r}"
            )


def validate_message(msg) -> None:
    if not isinstance(msg, dict):
        raise ProtocolError("message must be an object")
    kind = msg.get("kind")
    if kind not in KINDS:
        raise ProtocolError(f"unknown kind {kind!r}")
    if msg.get("v") != PROTOCOL_VERSION:
        raise ProtocolError(f"unsupported protocol version {msg.get('v')!r}")
    if kind == "hello":
        _require(msg, "role")
        if msg["role"] not in ("agent", "server"):
            raise ProtocolError(f"bad role {msg['role']!r}")
    elif kind == "task_offer":
        _require(msg, "session", "task")
    elif kind == "action":
        _require(msg, "session", "tool", "args")
        validate_action_args(msg["tool"], msg["args"])
    elif kind == "observation":
        _require(msg, "session", "payload", "candidates_remaining",
                 "turns_used", "done")
    elif kind == "result":
        _require(msg, "session", "transcript")


_NO_ARG_TOOLS = ("T1", "T2", "T3", "T5")


def validate_action_args(tool, args) -> None:
    if not isinstance(args, dict):
        raise ProtocolError("args must be an object")
    if tool in _NO_ARG_TOOLS:
        return
    if tool == "T4":
        query = args.get("query", "attribute")
        if query == "spatial":
            return
        if query != "attribute" or not isinstance(args.get("attribute"), str):
            raise ProtocolError("T4 needs query=spatial or an attribute")
    elif tool == "T6":
        if not isinstance(args.get("attribute"), str) or \
                not isinstance(args.get("value"), str):
            raise ProtocolError("T6 needs attribute and value strings")
    elif tool == "T7":
        cams = args.get("cameras")
        if not isinstance(cams, list) or \
                not all(isinstance(c, str) for c in cams):
            raise ProtocolError("T7 needs a camera id list")
    elif tool == "T8":
        if not isinstance(args.get("prediction"), int):
            raise ProtocolError("T8 needs an integer prediction")
        ranking = args.get("ranking")
        if ranking is not None and (
                not isinstance(ranking, list)
                or not all(isinstance(i, int) for i in ranking)):
            raise ProtocolError("T8 ranking must be an id list")
    else:
        raise ProtocolError(f"unknown tool {tool!r}")


def hello_server(n_tasks: int) -> dict:
    return {"kind": "hello", "v": PROTOCOL_VERSION, "role": "server",
            "n_tasks": n_tasks}


def hello_agent(name: str) -> dict:
    return {"kind": "hello", "v": PROTOCOL_VERSION, "role": "agent",
            "name": name}


def task_offer(session: str, task_view: dict) -> dict:
    return {"kind": "task_offer", "v": PROTOCOL_VERSION, "session": session,
            "task": task_view}


def action_msg(session: str, tool: str, args: dict) -> dict:
    return {"kind": "action", "v": PROTOCOL_VERSION, "session": session,
            "tool": tool, "args": args}


def observation_msg(session: str, obs) -> dict:
    return {
        "kind": "observation", "v": PROTOCOL_VERSION, "session": session,
        "payload": obs.payload,
        "candidates_remaining": obs.candidates_remaining,
        "turns_used": obs.turns_used,
        "done": obs.done,
        "outcome": obs.outcome,
    }


def result_msg(session: str, transcript_json: dict) -> dict:
    return {"kind": "result", "v": PROTOCOL_VERSION, "session": session,
            "transcript": transcript_json}
