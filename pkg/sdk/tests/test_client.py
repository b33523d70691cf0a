"""SDK tests: golden-corpus byte parity, local validation, and transcript
parity with the in-process reference agent, talking only to the server's
public command-line surface."""

import json
import re
import socket
import subprocess
import sys
import time
from pathlib import Path

import pytest

from camsearch_sdk import (
    Client,
    ClientSession,
    ProtocolError,
    ServerClosed,
    decode,
    encode,
    validate_action,
)

REPO = Path(__file__).resolve().parents[2]
GOLDEN = REPO / "tests" / "data" / "protocol_golden.jsonl"


def test_golden_corpus_round_trips_byte_exactly():
    lines = GOLDEN.read_bytes().splitlines(keepends=True)
    assert len(lines) >= 12
    for line in lines:
        assert encode(decode(line)) == line


def test_local_validation_rejects_before_send():
    dead = socket.socket()  # never connected: a send would raise OSError
    client = Client.__new__(Client)
    client._sock = dead
    client._buf = b""
    session = ClientSession(session_id="s0000", task={})
    with pytest.raises(ProtocolError):
        client.act(session, "T9", {})
    with pytest.raises(ProtocolError):
        client.act(session, "T8", {"prediction": "three"})
    with pytest.raises(ProtocolError):
        client.act(session, "T6", {"attribute": "hair_color"})
    with pytest.raises(ProtocolError):
        client.act(session, "T7", {"cameras": "c01"})
    dead.close()


def test_decode_rejects_foreign_messages():
    with pytest.raises(ProtocolError):
        decode(b'{"kind":"teleport","v":1}')
    with pytest.raises(ProtocolError):
        decode(b'{"kind":"hello","v":2,"role":"agent"}')
    with pytest.raises(ProtocolError):
        decode(b"{broken")


# --- end-to-end against the real server -----------------------------------------

@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """Build a world and task file through the public CLI."""
    root = tmp_path_factory.mktemp("sdk-e2e")
    world = root / "world.json"
    sttg = root / "sttg.json"
    tasks = root / "tasks.json"

    def cli(*args):
        proc = subprocess.run(
            [sys.executable, "-m", "camsearch.cli", *args],
            capture_output=True, text=True, timeout=300,
        )
        assert proc.returncode == 0, proc.stderr
        return proc.stdout

    cli("gen-world", "--topology", "factory", "--persons", "120",
        "--seed", "9", "--out", str(world))
    cli("build-sttg", "--world", str(world), "--out", str(sttg))
    cli("gen-tasks", "--track", "all", "--world", str(world),
        "--sttg", str(sttg), "--seed", "42", "--out", str(tasks))
    payload = json.loads(tasks.read_text())
    assert len(payload) >= 50, "need at least 50 tasks for the parity check"
    transcripts = root / "oracle.jsonl"
    cli("run", "--agent", "oracle", "--tasks", str(tasks),
        "--world", str(world), "--seed", "0", "--out", str(transcripts))
    return {"root": root, "world": world, "tasks": tasks,
            "task_payload": payload, "oracle_transcripts": transcripts}


def _start_server(pipeline, connections=1):
    proc = subprocess.Popen(
        [sys.executable, "-m", "camsearch.cli", "serve",
         "--tasks", str(pipeline["tasks"]), "--world",
         str(pipeline["world"]), "--port", "0",
         "--connections", str(connections)],
        stdout=subprocess.PIPE, text=True,
    )
    line = proc.stdout.readline()
    match = re.match(r"listening on ([\d.]+):(\d+)", line)
    assert match, line
    return proc, match.group(1), int(match.group(2))


def _oracle_script(task_ground_truth):
    """Callback replaying the stored path from the task file (the SDK itself
    never sees ground truth; the test harness reads the public artifact)."""
    def plan(task):
        actions = []
        for step in task["oracle_path"]:
            if step["kind"] == "Temporal":
                actions.append(("T5", {}))
            elif step["kind"] == "Spatial":
                actions.append(("T4", {"query": "spatial"}))
                actions.append(("T7", {
                    "cameras": [task["track2"]["target_camera"]],
                }))
            else:
                if task["track"] != 1:
                    actions.append(("T4", {
                        "query": "attribute",
                        "attribute": step["attribute"],
                    }))
                actions.append(("T6", {"attribute": step["attribute"],
                                       "value": step["value"]}))
        remaining = set(task["initial_candidates"])
        for step in task["oracle_path"]:
            remaining -= set(step["eliminated_ids"])
        prediction = sorted(remaining)[0]
        actions.append(("T8", {"prediction": prediction,
                               "ranking": [prediction]}))
        return actions

    scripts = {}

    def callback(session, observation):
        task_id = session.task["task_id"]
        if task_id not in scripts:
            scripts[task_id] = plan(task_ground_truth[task_id])
        return scripts[task_id].pop(0)

    return callback


def test_wire_oracle_parity_with_in_process_runs(pipeline):
    proc, host, port = _start_server(pipeline)
    try:
        client = Client.connect(host, port, name="scripted-oracle")
        ground_truth = {t["id"]: t for t in pipeline["task_payload"]}
        transcripts = client.run_loop(_oracle_script(ground_truth))
        client.close()
    finally:
        proc.wait(timeout=60)
    in_process = [
        json.loads(line)
        for line in pipeline["oracle_transcripts"].read_text().splitlines()
        if line.strip()
    ]
    assert len(transcripts) == len(in_process) >= 50
    by_id = {t["task_id"]: t for t in in_process}
    for got in transcripts:
        assert got == by_id[got["task_id"]], got["task_id"]


def test_budget_exhaustion_returns_timeout_result(pipeline):
    proc, host, port = _start_server(pipeline)
    try:
        client = Client.connect(host, port, name="stubborn")
        seen = {}

        def waste_turns(session, observation):
            if session.task["track"] in (2, 3):
                return ("T4", {"query": "attribute",
                               "attribute": "hair_color"})
            # track 1 has no witness: predict an arbitrary candidate
            return ("T8", {"prediction": 0})

        transcripts = client.run_loop(waste_turns)
        client.close()
    finally:
        proc.wait(timeout=120)
    interactive = [t for t in transcripts if t["track"] in (2, 3)]
    assert interactive
    assert all(t["outcome"] == "timeout" for t in interactive)
    assert all(t["turns_used"] == 20 for t in interactive)


def test_session_mirror_matches_reported_transcript(pipeline):
    proc, host, port = _start_server(pipeline)
    mirrors = {}
    try:
        client = Client.connect(host, port, name="mirror")
        ground_truth = {t["id"]: t for t in pipeline["task_payload"]}
        script = _oracle_script(ground_truth)

        def spying(session, observation):
            mirrors[session.task["task_id"]] = session
            return script(session, observation)

        transcripts = client.run_loop(spying)
        client.close()
    finally:
        proc.wait(timeout=60)
    for transcript in transcripts:
        session = mirrors[transcript["task_id"]]
        assert session.turns_used == transcript["turns_used"]
        assert session.outcome == transcript["outcome"]
        assert session.done


def test_server_disconnect_raises_server_closed(pipeline):
    proc, host, port = _start_server(pipeline)
    client = Client.connect(host, port, name="doomed")
    msg = client._recv()
    assert msg["kind"] == "task_offer"
    proc.kill()
    proc.wait(timeout=30)
    session = ClientSession(session_id=msg["session"], task=msg["task"])
    with pytest.raises((ServerClosed, ProtocolError)):
        for _ in range(50):
            client.act(session, "T1", {})
            time.sleep(0.05)
    client.close()
