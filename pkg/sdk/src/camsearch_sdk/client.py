"""Synchronous client for the camsearch newline-delimited JSON protocol.

Implements the wire contract from docs/wire_protocol.md independently of the
server package: canonical encoding (sorted keys, ASCII, compact separators,
LF framing) and local validation of every action before it is sent. The
session view mirrors exactly what the server reveals: clue dialogue,
candidate count, and turn counters, never the target.
"""

from __future__ import annotations

import json
import socket
from dataclasses import dataclass, field

PROTOCOL_VERSION = 1
KINDS = ("hello", "task_offer", "action", "observation", "result")
TOOLS = ("T1", "T2", "T3", "T4", "T5", "T6", "T7", "T8")


class ProtocolError(Exception):
    pass


class ServerClosed(Exception):
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
    if not isinstance(msg, dict) or msg.get("kind") not in KINDS:
        raise ProtocolError(f"unknown message {msg!r}")
    if msg.get("v") != PROTOCOL_VERSION:
        raise ProtocolError(f"unsupported version {msg.get('v')!r}")
    return msg


def validate_action(tool: str, args: dict) -> None:
    """Schema-check an action locally so bad requests never hit the wire."""
    if tool not in TOOLS:
        raise ProtocolError(f"unknown tool {tool!r}")
    if not isinstance(args, dict):
        raise ProtocolError("args must be an object")
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


@dataclass
class ClientSession:
    """Live view of one task: only what the protocol reveals."""
    session_id: str
    task: dict
    turns_used: int = 0
    candidates_remaining: int = 0
    done: bool = False
    outcome: str | None = None
    observations: list = field(default_factory=list)

    def update(self, observation: dict) -> None:
        self.turns_used = observation["turns_used"]
        self.candidates_remaining = observation["candidates_remaining"]
        self.done = observation["done"]
        self.outcome = observation.get("outcome")
        self.observations.append(observation)


class Client:
    def __init__(self, sock: socket.socket, server_hello: dict):
        self._sock = sock
        self._buf = b""
        self.server_hello = server_hello
        self.n_tasks = server_hello.get("n_tasks")

    @classmethod
    def connect(cls, host: str, port: int, name: str = "sdk-agent"
                ) -> "Client":
        sock = socket.create_connection((host, port))
        sock.sendall(encode({
            "kind": "hello", "v": PROTOCOL_VERSION, "role": "agent",
            "name": name,
        }))
        client = cls.__new__(cls)
        client._sock = sock
        client._buf = b""
        hello = client._recv()
        if hello is None or hello["kind"] != "hello" or \
                hello.get("role") != "server":
            raise ProtocolError(f"expected server hello, got {hello!r}")
        client.server_hello = hello
        client.n_tasks = hello.get("n_tasks")
        return client

    def close(self) -> None:
        self._sock.close()

    def _send(self, msg: dict) -> None:
        try:
            self._sock.sendall(encode(msg))
        except OSError as e:
            raise ServerClosed(str(e)) from e

    def _recv(self) -> dict | None:
        while b"\n" not in self._buf:
            try:
                chunk = self._sock.recv(65536)
            except OSError as e:
                raise ServerClosed(str(e)) from e
            if not chunk:
                return None
            self._buf += chunk
        line, self._buf = self._buf.split(b"\n", 1)
        return decode(line)

    def act(self, session: ClientSession, tool: str, args: dict | None = None
            ) -> dict:
        """Validate locally, send the action, return the observation."""
        args = args or {}
        validate_action(tool, args)
        self._send({
            "kind": "action", "v": PROTOCOL_VERSION,
            "session": session.session_id, "tool": tool, "args": args,
        })
        msg = self._recv()
        if msg is None:
            raise ServerClosed("connection closed mid-session")
        if msg["kind"] != "observation":
            raise ProtocolError(f"expected observation, got {msg['kind']}")
        session.update(msg)
        return msg

    def run_loop(self, agent_callback) -> list[dict]:
        """Drive every offered task through the callback; returns the
        transcripts the server reports.

        The callback receives (session, last_observation_or_None) and
        returns the next (tool, args) pair. It is re-invoked until the
        session finishes (prediction, timeout, or server-side termination).
        """
        transcripts = []
        while True:
            msg = self._recv()
            if msg is None:
                return transcripts
            if msg["kind"] == "result":
                transcripts.append(msg["transcript"])
                continue
            if msg["kind"] != "task_offer":
                raise ProtocolError(f"unexpected {msg['kind']}")
            session = ClientSession(
                session_id=msg["session"],
                task=msg["task"],
                candidates_remaining=msg["task"].get("candidate_count", 0),
            )
            observation = None
            while not session.done:
                tool, args = agent_callback(session, observation)
                observation = self.act(session, tool, args)
