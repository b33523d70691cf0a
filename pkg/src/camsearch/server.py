"""NDJSON session server hosting the environment for external agents.

One agent connection at a time: after the hello exchange the server streams
a task offer, relays actions and observations, emits a result per finished
session, and closes the connection once every task is done. A dropped
connection mid-session scores that session as a timeout.
"""

from __future__ import annotations

import logging
import socket

from . import protocol as wire
from .env import Action, Environment
from .metrics import transcript_to_json

log = logging.getLogger(__name__)


class Disconnect(Exception):
    pass


class _LineChannel:
    def __init__(self, sock: socket.socket):
        self._sock = sock
        self._buf = b""

    def send(self, msg: dict) -> None:
        try:
            self._sock.sendall(wire.encode(msg))
        except OSError as e:
            raise Disconnect(str(e)) from e

    def recv(self) -> dict:
        while b"\n" not in self._buf:
            try:
                chunk = self._sock.recv(65536)
            except OSError as e:
                raise Disconnect(str(e)) from e
            if not chunk:
                raise Disconnect("connection closed")
            self._buf += chunk
        line, self._buf = self._buf.split(b"\n", 1)
        return wire.decode(line)


def _timeout_session(session) -> None:
    session.done = True
    session.outcome = "timeout"


def serve_connection(env: Environment, tasks, channel: _LineChannel,
                     seed: int = 0) -> list:
    """Drive one connected agent through every task; returns transcripts."""
    try:
        hello = channel.recv()
        if hello["kind"] != "hello" or hello.get("role") != "agent":
            raise wire.ProtocolError("expected agent hello")
        channel.send(wire.hello_server(len(tasks)))
    except Disconnect:
        return []

    transcripts = []
    for i, task in enumerate(sorted(tasks, key=lambda t: t.id)):
        session_id = f"s{i:04d}"
        session = env.create_session(task.id, seed)
        try:
            channel.send(wire.task_offer(session_id, env.task_view(task)))
            while not session.done:
                msg = channel.recv()
                if msg["kind"] != "action":
                    raise wire.ProtocolError(
                        f"expected action, got {msg['kind']}"
                    )
                if msg["session"] != session_id:
                    raise wire.ProtocolError("session id mismatch")
                obs = env.step(session,
                               Action(tool=msg["tool"], args=msg["args"]))
                channel.send(wire.observation_msg(session_id, obs))
        except Disconnect:
            log.warning("agent disconnected during %s; scoring timeout",
                        task.id)
            _timeout_session(session)
            transcripts.append(env.transcript(session))
            break
        transcript = env.transcript(session)
        transcripts.append(transcript)
        try:
            channel.send(wire.result_msg(session_id,
                                         transcript_to_json(transcript)))
        except Disconnect:
            break
    return transcripts


class EvalServer:
    """Listens on a TCP port; serves one agent connection after another."""

    def __init__(self, env: Environment, tasks, host: str = "127.0.0.1",
                 port: int = 0, seed: int = 0):
        self.env = env
        self.tasks = list(tasks)
        self.seed = seed
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._sock.bind((host, port))
        self._sock.listen(4)
        self.host, self.port = self._sock.getsockname()
        self.transcripts: list = []

    def serve_one(self) -> list:
        """Accept a single connection, run all tasks, close, return results."""
        conn, _ = self._sock.accept()
        try:
            results = serve_connection(self.env, self.tasks,
                                       _LineChannel(conn), self.seed)
        finally:
            conn.close()
        self.transcripts.extend(results)
        return results

    def close(self) -> None:
        self._sock.close()


def run_external(env: Environment, tasks, host: str, port: int,
                 seed: int = 0) -> list:
    """Connect out to a listening agent endpoint and drive it through the
    task set. Sessions interrupted by a drop are scored as timeouts."""
    sock = socket.create_connection((host, port))
    try:
        return serve_connection(env, tasks, _LineChannel(sock), seed)
    except Disconnect:
        return []
    finally:
        sock.close()
