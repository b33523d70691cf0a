"""Command-line entry point chaining the full pipeline.

gen-world -> build-sttg -> gen-tasks -> run/serve -> score, plus a text-mode
`play` loop for poking at a session by hand. All randomness comes from
explicit --seed flags; identical inputs and seeds produce byte-identical
outputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import protocol as wire
from .agents import AGENT_RUNNERS, run_batch
from .config import RunConfig, load_run_config
from .env import Action, Environment
from .generate import WorldGenConfig, generate_world, inject_anomalies
from .metrics import aggregate, transcript_from_json, transcript_to_json
from .report import render_text, write_csv, write_figures, write_report_json
from .sttg import build_sttg, sttg_from_json, sttg_to_dot, sttg_to_json
from .tasks import gen_track1, gen_track2, gen_track3, load_tasks, save_tasks
from .topology import load_topology, load_topology_file
from .world import canonical_json_bytes, load_world, save_world


def _write_json(obj, path) -> None:
    Path(path).write_bytes(canonical_json_bytes(obj) + b"\n")


def _run_config(args) -> RunConfig:
    if getattr(args, "config", None):
        return load_run_config(args.config)
    return RunConfig()


def _topology_for(args, world, cfg: RunConfig | None = None):
    path = getattr(args, "topology_file", None) or \
        (cfg.topology_file if cfg else None)
    if path:
        return load_topology_file(path)
    return load_topology(world.topology_name)


def cmd_gen_world(args) -> int:
    cfg = WorldGenConfig(
        topology=args.topology,
        n_persons=args.persons,
        seed=args.seed,
        mean_cams_per_person=args.mean_cams,
        uncertain_rate=args.uncertain_rate,
        edge_time_model=args.edge_time_model,
    )
    world = generate_world(cfg)
    if args.inject_reversals or args.inject_slow:
        world = inject_anomalies(world, args.inject_reversals,
                                 args.inject_slow, seed=args.seed)
    save_world(world, args.out)
    print(f"wrote {args.out} ({len(world.gallery)} persons, "
          f"{len(world.cameras)} cameras)")
    return 0


def cmd_build_sttg(args) -> int:
    cfg = _run_config(args)
    world = load_world(args.world)
    topology = _topology_for(args, world, cfg)
    frame_gap = cfg.frame_gap_s if args.frame_gap is None else args.frame_gap
    sttg = build_sttg(world, topology, frame_gap_s=frame_gap,
                      include_warn=args.include_warn or cfg.include_warn)
    _write_json(sttg_to_json(sttg), args.out)
    if args.dot:
        Path(args.dot).write_text(sttg_to_dot(sttg))
    print(f"wrote {args.out} ({len(sttg.edges)} edges, "
          f"{len(sttg.zones)} zones)")
    return 0


def cmd_gen_tasks(args) -> int:
    cfg = _run_config(args)
    world = load_world(args.world)
    topology = _topology_for(args, world, cfg)
    tracks = [1, 2, 3] if args.track == "all" else [int(args.track)]
    needs_sttg = any(t in (2, 3) for t in tracks)
    sttg = None
    if needs_sttg:
        if not args.sttg:
            print("error: --sttg required for tracks 2 and 3",
                  file=sys.stderr)
            return 2
        with open(args.sttg, "rb") as f:
            sttg = sttg_from_json(json.load(f))
    tasks = []
    for track in tracks:
        if track == 1:
            tasks.extend(gen_track1(world, seed=args.seed,
                                    scenario=args.scenario))
        elif track == 2:
            tasks.extend(gen_track2(world, sttg, topology, seed=args.seed,
                                    scenario=args.scenario))
        else:
            tasks.extend(gen_track3(world, sttg, seed=args.seed,
                                    scenario=args.scenario,
                                    vague_buckets=cfg.vague_buckets))
    save_tasks(tasks, args.out)
    per_track = {t: sum(1 for x in tasks if x.track == t) for t in tracks}
    print(f"wrote {args.out} ({len(tasks)} tasks: "
          + ", ".join(f"track{t}={n}" for t, n in per_track.items()) + ")")
    return 0


def cmd_run(args) -> int:
    world = load_world(args.world)
    topology = _topology_for(args, world)
    tasks = load_tasks(args.tasks)
    env = Environment(world, tasks, topology=topology)
    transcripts = run_batch(env, tasks, args.agent, seed=args.seed,
                            jobs=args.jobs)
    with open(args.out, "wb") as f:
        for t in transcripts:
            f.write(canonical_json_bytes(transcript_to_json(t)) + b"\n")
    n_ok = sum(1 for t in transcripts if t.outcome == "correct")
    print(f"wrote {args.out} ({len(transcripts)} transcripts, "
          f"{n_ok} correct)")
    return 0


def cmd_serve(args) -> int:
    from .server import EvalServer

    world = load_world(args.world)
    topology = _topology_for(args, world)
    tasks = load_tasks(args.tasks)
    env = Environment(world, tasks, topology=topology)
    server = EvalServer(env, tasks, host=args.host, port=args.port,
                        seed=args.seed)
    print(f"listening on {server.host}:{server.port}", flush=True)
    try:
        for _ in range(args.connections):
            server.serve_one()
    finally:
        server.close()
    if args.out:
        with open(args.out, "wb") as f:
            for t in server.transcripts:
                f.write(canonical_json_bytes(transcript_to_json(t)) + b"\n")
        print(f"wrote {args.out} ({len(server.transcripts)} transcripts)")
    return 0


def cmd_score(args) -> int:
    transcripts = []
    with open(args.transcripts, "r", encoding="utf-8") as f:
        for line in f:
            if line.strip():
                transcripts.append(transcript_from_json(json.loads(line)))
    if not transcripts:
        print("error: no transcripts", file=sys.stderr)
        return 2
    reports = {}
    for track in sorted({t.track for t in transcripts}):
        batch = [t for t in transcripts if t.track == track]
        reports[f"track{track}"] = aggregate(batch)
    print(render_text(reports))
    if args.out_dir:
        outdir = Path(args.out_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        write_report_json(reports, outdir / "report.json")
        write_csv(transcripts, outdir / "per_task.csv")
        if not args.no_figures:
            written = write_figures(reports, outdir / "figures")
            print("figures: " + ", ".join(written))
        print(f"wrote {outdir / 'report.json'} and {outdir / 'per_task.csv'}")
    return 0


def cmd_play(args) -> int:
    world = load_world(args.world)
    topology = _topology_for(args, world)
    tasks = load_tasks(args.tasks)
    env = Environment(world, tasks, topology=topology)
    task = env.tasks.get(args.task_id) if args.task_id else \
        sorted(env.tasks.values(), key=lambda t: t.id)[0]
    if task is None:
        print(f"error: unknown task {args.task_id}", file=sys.stderr)
        return 2
    session = env.create_session(task.id, args.seed)
    view = env.task_view(task)
    print(json.dumps(view, indent=1))
    print("commands: t1 | t2 | t3 | t5 | ask <attr> | spatial | "
          "filter <attr> <value> | loc <cam> [cam...] | predict <id> | quit")
    while not session.done:
        try:
            line = input("> ").strip()
        except EOFError:
            break
        if not line or line == "quit":
            break
        parts = line.split()
        cmd = parts[0].lower()
        try:
            if cmd in ("t1", "t2", "t3", "t5"):
                action = Action(cmd.upper())
            elif cmd == "ask":
                action = Action("T4", {"query": "attribute",
                                       "attribute": parts[1]})
            elif cmd == "spatial":
                action = Action("T4", {"query": "spatial"})
            elif cmd == "filter":
                action = Action("T6", {"attribute": parts[1],
                                       "value": " ".join(parts[2:])})
            elif cmd == "loc":
                action = Action("T7", {"cameras": parts[1:]})
            elif cmd == "predict":
                action = Action("T8", {"prediction": int(parts[1])})
            else:
                print("unknown command")
                continue
        except (IndexError, ValueError):
            print("bad arguments")
            continue
        obs = env.step(session, action)
        print(json.dumps({
            "payload": obs.payload,
            "candidates_remaining": obs.candidates_remaining,
            "turns_used": obs.turns_used,
            "done": obs.done,
            "outcome": obs.outcome,
        }, indent=1, default=str))
    if session.done:
        print(json.dumps(transcript_to_json(env.transcript(session)),
                         indent=1))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="camsearch",
        description="multi-camera person-search benchmark toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-world", help="generate a synthetic world")
    p.add_argument("--topology", choices=("factory", "university"),
                   default="factory")
    p.add_argument("--persons", type=int, default=90)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mean-cams", type=float, default=5.9)
    p.add_argument("--uncertain-rate", type=float, default=0.0117)
    p.add_argument("--edge-time-model",
                   choices=("lognormal", "triangular"), default="lognormal")
    p.add_argument("--inject-reversals", type=int, default=0)
    p.add_argument("--inject-slow", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_world)

    p = sub.add_parser("build-sttg", help="build the topology graph")
    p.add_argument("--world", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dot", help="also write a DOT rendering")
    p.add_argument("--frame-gap", type=float, default=None,
                   help="intra-camera split threshold (default 4.3 s)")
    p.add_argument("--include-warn", action="store_true",
                   help="feed WARN transitions into statistics (non-standard)")
    p.add_argument("--topology-file")
    p.add_argument("--config", help="run-config JSON (see camsearch.config)")
    p.set_defaults(func=cmd_build_sttg)

    p = sub.add_parser("gen-tasks", help="generate ground-truth tasks")
    p.add_argument("--track", choices=("1", "2", "3", "all"), required=True)
    p.add_argument("--world", required=True)
    p.add_argument("--sttg")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--scenario")
    p.add_argument("--out", required=True)
    p.add_argument("--topology-file")
    p.add_argument("--config", help="run-config JSON (see camsearch.config)")
    p.set_defaults(func=cmd_gen_tasks)

    p = sub.add_parser("run", help="run a reference agent over a task file")
    p.add_argument("--agent", choices=sorted(AGENT_RUNNERS), required=True)
    p.add_argument("--tasks", required=True)
    p.add_argument("--world", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--topology-file")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("serve", help="host sessions for external agents")
    p.add_argument("--tasks", required=True)
    p.add_argument("--world", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--connections", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--topology-file")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("score", help="score transcripts into a report")
    p.add_argument("--transcripts", required=True)
    p.add_argument("--out-dir")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("play", help="drive a session from the terminal")
    p.add_argument("--tasks", required=True)
    p.add_argument("--world", required=True)
    p.add_argument("--task-id")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--topology-file")
    p.set_defaults(func=cmd_play)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
