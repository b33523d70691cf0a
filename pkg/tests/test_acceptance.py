"""Acceptance suite: one test per release criterion, each printing a
[PASS] line with the measured numbers (run with -s to see them)."""

import time
from pathlib import Path

import numpy as np
import pytest

from camsearch.agents import (
    AgentConfig,
    parse_witness_response,
    run_agent,
    run_batch,
    run_greedy_ig,
    run_oracle,
)
from camsearch.cli import main as cli_main
from camsearch.dialogue import load_templates
from camsearch.env import Environment
from camsearch.fixtures import HERO3, T1HERO
from camsearch.generate import WorldGenConfig, generate_world
from camsearch.metrics import aggregate, auc_crr, sr_at, tws
from camsearch.schema import K3, UNCERTAIN, default_schema
from camsearch.sttg import build_sttg, build_zones, classify_feasibility
from camsearch.tasks import gen_track1, gen_track2, gen_track3, \
    path_final_ids
from camsearch.topology import load_topology

WORLD_SIZE = 600
WORLD_SEEDS = (600, 601, 602, 603)  # alternating factory / university
ABLATION_WORLDS = 2                 # ablation batches draw from these
BATCH_SEED = 7


@pytest.fixture(scope="module")
def corpus():
    """Seeded multi-world task corpus shared by the statistical criteria."""
    topologies = {
        "factory": load_topology("factory"),
        "university": load_topology("university"),
    }
    worlds = []
    t0 = time.time()
    for i, seed in enumerate(WORLD_SEEDS):
        name = "factory" if i % 2 == 0 else "university"
        world = generate_world(WorldGenConfig(name, WORLD_SIZE, seed=seed))
        topo = topologies[name]
        sttg = build_sttg(world, topo)
        sc = f"s{i:02d}"
        tasks = (gen_track1(world, scenario=sc)
                 + gen_track2(world, sttg, topo, scenario=sc)
                 + gen_track3(world, sttg, scenario=sc))
        env = Environment(world, tasks, topology=topo)
        worlds.append({"world": world, "sttg": sttg, "tasks": tasks,
                       "env": env})
    build_s = time.time() - t0
    by_track = {1: [], 2: [], 3: []}
    for i, entry in enumerate(worlds):
        for task in entry["tasks"]:
            by_track[task.track].append((entry["env"], task, i))
    return {"worlds": worlds, "by_track": by_track, "build_s": build_s}


def _sample(pool, n, seed=BATCH_SEED):
    rng = np.random.Generator(np.random.PCG64(seed))
    idx = rng.choice(len(pool), size=min(n, len(pool)), replace=False)
    return [pool[i] for i in sorted(idx)]


def test_c01_oracle_parity(corpus):
    """Oracle scores TWS = 1.000, Top-1 = 100.0, SR@5 = 100.0 exactly on
    >= 500 generated tasks per track, in under a minute."""
    t0 = time.time()
    for track in (1, 2, 3):
        pool = corpus["by_track"][track]
        assert len(pool) >= 500, (track, len(pool))
        transcripts = [run_oracle(env, task) for env, task, _ in pool]
        report = aggregate(transcripts)
        assert report.tws == 1.0, track
        assert report.top1 == 1.0, track
        assert report.sr5 == 1.0, track
    elapsed = time.time() - t0
    assert elapsed < 60.0, f"oracle parity took {elapsed:.1f}s"
    counts = {t: len(corpus["by_track"][t]) for t in (1, 2, 3)}
    print(f"\n[PASS] oracle parity: TWS=1.000 Top-1=100.0 SR@5=100.0 on "
          f"{counts} tasks in {elapsed:.1f}s")


def test_c02_track3_fixture_regression(fixture_world, fixture_sttg,
                                       fixture_env, fixture_tasks):
    """Shipped fixture reproduces the two-sighting walkthrough exactly."""
    edge = fixture_sttg.edge("c05", "c08")
    assert (edge.t_min, edge.t_med, edge.t_max) == (7.6, 11.2, 20.7)
    assert edge.n == 23
    task = next(t for t in fixture_tasks
                if t.track == 3 and t.target == HERO3)
    assert len(task.initial_candidates) == 15
    temporal = task.oracle_path[0]
    assert (temporal.candidates_before, temporal.candidates_after) == (15, 5)
    reasons = sorted(r for _, r in task.track3.verdicts.values() if r)
    assert reasons == sorted(["TIME_REVERSAL"] * 5 + ["TOO_SLOW"]
                             + ["NOT_PRESENT"] * 4)
    transcript = run_greedy_ig(fixture_env, task)
    assert transcript.outcome == "correct"
    assert transcript.turns_used == 2
    assert tws([transcript]) == 1.0
    print("\n[PASS] track-3 fixture: edge 7.6/11.2/20.7 n=23, 15->5 "
          "{5 TIME_REVERSAL, 1 TOO_SLOW, 4 NOT_PRESENT}, greedy 2 turns "
          "TWS 1.0")


def test_c03_track1_fixture_regression(fixture_world, fixture_tasks):
    """Narrowing 90 -> 11 -> 3 -> 1 on the shipped fixture."""
    assert len(fixture_world.gallery) == 90
    task = next(t for t in fixture_tasks
                if t.track == 1 and t.target == T1HERO)
    assert len(task.initial_candidates) == 11
    narrowing = [s.candidates_after for s in task.oracle_path]
    assert narrowing == [3, 1]
    assert path_final_ids(task.initial_candidates, task.oracle_path) == \
        {T1HERO}
    print("\n[PASS] track-1 fixture: 90 -> 11 -> 3 -> 1")


def test_c04_feasibility_oracle_equivalence(fixture_sttg):
    """classify_feasibility matches an independent transcription of the
    four-stage check on >= 10,000 random cases, zero mismatches, < 5 s."""
    from camsearch.world import Trajectory, Visit

    rng = np.random.Generator(np.random.PCG64(41))
    edges = [e for e in fixture_sttg.edges.values()
             if e.from_cam != e.to_cam]
    t0 = time.time()
    mismatches = 0
    n_cases = 10_000
    for _ in range(n_cases):
        edge = edges[int(rng.integers(0, len(edges)))]
        c1, c2 = edge.from_cam, edge.to_cam
        use_missing = rng.random() < 0.1
        delta = float(rng.uniform(-80, 150))
        exit1 = float(rng.uniform(10, 100))
        visits = [Visit(c1, exit1 - 8.0, exit1)]
        if not use_missing:
            visits.append(Visit(c2, exit1 + delta, exit1 + delta + 6.0))
        visits.sort(key=lambda v: v.enter)
        traj = Trajectory(person=0, visits=tuple(visits))
        got = classify_feasibility(traj, c1, c2, 10.0, fixture_sttg)

        # independent transcription
        if use_missing:
            want = ("IMPOSSIBLE", "NOT_PRESENT")
        elif delta < -5.0:
            want = ("IMPOSSIBLE", "TIME_REVERSAL")
        elif 0 < delta < edge.t_min / 2.0:
            want = ("IMPOSSIBLE", "TOO_FAST")
        elif delta > edge.t_max * 2.0:
            want = ("IMPOSSIBLE", "TOO_SLOW")
        else:
            want = ("FEASIBLE", None)
        if (got.status.value,
                got.reason.value if got.reason else None) != want:
            mismatches += 1
    elapsed = time.time() - t0
    assert mismatches == 0
    assert elapsed < 5.0, f"{elapsed:.2f}s"
    print(f"\n[PASS] feasibility equivalence: {n_cases} cases, 0 mismatches, "
          f"{elapsed:.2f}s")


def test_c05_zoning_equivalence():
    """Union-find zones equal an independent component search on 1,000
    random topologies; shipped configs give 9 and 6 atomic zones."""
    rng = np.random.Generator(np.random.PCG64(13))

    def bfs(cameras, pairs):
        adjacency = {c: set() for c in cameras}
        for pair in pairs:
            a, b = sorted(pair)
            adjacency[a].add(b)
            adjacency[b].add(a)
        seen, comps = set(), set()
        for cam in cameras:
            if cam in seen:
                continue
            comp, stack = {cam}, [cam]
            while stack:
                for nxt in adjacency[stack.pop()]:
                    if nxt not in comp:
                        comp.add(nxt)
                        stack.append(nxt)
            seen |= comp
            comps.add(frozenset(comp))
        return comps

    for _ in range(1000):
        n = int(rng.integers(2, 24))
        cams = tuple(f"c{i:02d}" for i in range(n))
        pairs = set()
        for _ in range(int(rng.integers(0, 2 * n))):
            a, b = rng.choice(n, size=2, replace=False)
            pairs.add(frozenset((cams[a], cams[b])))
        zones, _ = build_zones(cams, frozenset(pairs), frozenset())
        assert {z.cameras for z in zones} == bfs(cams, pairs)

    factory = load_topology("factory")
    zones, _ = build_zones(factory.cameras, factory.overlap_pairs,
                           factory.soft_pairs, factory.zone_names,
                           factory.composite_names)
    assert len(zones) == 9
    warehouse = next(z for z in zones if z.id == "F_WAREHOUSE")
    assert warehouse.cameras == frozenset({"c01", "c02", "c04", "c05"})
    university = load_topology("university")
    zones_u, _ = build_zones(university.cameras, university.overlap_pairs,
                             university.soft_pairs, university.zone_names,
                             university.composite_names)
    assert len(zones_u) == 6
    print("\n[PASS] zoning equivalence: 1000 random topologies, 0 "
          "mismatches; factory 9 zones (F_WAREHOUSE = c01 c02 c04 c05), "
          "university 6")


def test_c06_generation_guarantees(corpus):
    """100% uniqueness; 100% of spatial tasks carry a spatial step; 100% of
    temporal tasks carry a genuine temporal elimination. >= 1,000 tasks."""
    total = 0
    for track in (1, 2, 3):
        for _, task, _ in corpus["by_track"][track]:
            total += 1
            final = path_final_ids(task.initial_candidates, task.oracle_path)
            assert final == {task.target}, task.id
            if track == 2:
                assert any(s.kind == "Spatial" for s in task.oracle_path)
            if track == 3:
                reasons = {r for _, r in task.track3.verdicts.values() if r}
                assert reasons & {"TIME_REVERSAL", "TOO_SLOW"}, task.id
    assert total >= 1000
    print(f"\n[PASS] generation guarantees on {total} tasks: uniqueness, "
          "spatial steps, temporal eliminations all 100%")


def test_c07_metric_unit_suite():
    """Reference turn-weighting cases, budget-curve monotonicity, and the
    reduction-curve sum against brute force at 1e-12."""
    from camsearch.env import Transcript

    def make(outcome, turns, oracle, c0=10, trace=None):
        trace = trace or (1,) * 20
        return Transcript(
            task_id="x", track=3, outcome=outcome, turns_used=turns,
            oracle_turns=oracle, initial_candidates=c0,
            trace=tuple(trace) + (trace[-1],) * (20 - len(trace)),
            counters={}, predicted=1, ranking=None, target=1,
        )

    assert tws([make("correct", 2, 2)]) == 1.0
    assert tws([make("correct", 4, 2)]) == 0.5
    assert tws([make("correct", 1, 2)]) == 1.0

    batch = [make("correct", t, 2) for t in (1, 4, 9, 15)] + \
        [make("wrong", 3, 2)]
    curve = [sr_at(batch, T) for T in range(1, 21)]
    assert all(a <= b for a, b in zip(curve, curve[1:]))

    rng = np.random.Generator(np.random.PCG64(29))
    worst = 0.0
    for _ in range(100):
        c0 = int(rng.integers(1, 80))
        tau = int(rng.integers(1, 10))
        counts, cur = [], c0
        for _ in range(20):
            cur = int(rng.integers(0, cur + 1))
            counts.append(cur)
        t = make("correct", tau, tau, c0=c0, trace=tuple(counts))
        brute = sum(1 - counts[i] / c0 for i in range(tau)) / tau
        worst = max(worst, abs(auc_crr(t) - brute))
    assert worst <= 1e-12
    print(f"\n[PASS] metric unit suite: TWS cases, SR@T monotone, AUC-CRR "
          f"max deviation {worst:.1e}")


def test_c08_ablation_direction(corpus):
    """Greedy beats random ordering on turn-weighted success (strict), and
    disabling the temporal tool collapses Track 3 Top-1 below 40% of the
    enabled value. 200-task seeded batches, under two minutes."""
    t0 = time.time()
    by_track = corpus["by_track"]
    ablation_pool = {
        track: [(env, task) for env, task, wi in by_track[track]
                if wi < ABLATION_WORLDS]
        for track in (2, 3)
    }
    results = {}
    for track in (2, 3):
        batch = _sample(ablation_pool[track], 200)
        greedy = [run_agent(env, t, AgentConfig(kind="GreedyIG"))
                  for env, t in batch]
        rand = [run_agent(env, t, AgentConfig(kind="RandomOrder", seed=0))
                for env, t in batch]
        g, r = aggregate(greedy), aggregate(rand)
        assert g.tws > r.tws, (track, g.tws, r.tws)
        results[track] = (g, r, batch)
    g3, _, batch3 = results[3]
    no_t5 = [run_agent(env, t, AgentConfig(kind="GreedyIG",
                                           use_temporal=False))
             for env, t in batch3]
    n3 = aggregate(no_t5)
    assert n3.top1 < 0.4 * g3.top1, (n3.top1, g3.top1)
    elapsed = time.time() - t0
    assert elapsed < 120.0, f"{elapsed:.1f}s"
    print(f"\n[PASS] ablation: greedy TWS {results[2][0].tws:.3f}/"
          f"{g3.tws:.3f} > random {results[2][1].tws:.3f}/"
          f"{results[3][1].tws:.3f} (tracks 2/3); no-temporal Top-1 "
          f"{n3.top1:.3f} < 0.4 x {g3.top1:.3f}; {elapsed:.1f}s")


def test_c09_interpreter_round_trip():
    """Every template crossed with every observable value parses back."""
    schema = default_schema()
    templates = load_templates()
    checked = 0
    for attribute in K3:
        for value in schema.get(attribute).values:
            if value == UNCERTAIN:
                continue
            for template in templates:
                got = parse_witness_response(
                    template.format(value=value), attribute, schema
                )
                assert got == value, (template, attribute, value)
                checked += 1
    print(f"\n[PASS] interpreter round-trip: {checked} "
          "template x value pairs, 100%")


def test_c10_pipeline_determinism(tmp_path):
    """gen-world -> build-sttg -> gen-tasks -> run greedy -> score, twice
    with identical seeds: byte-identical artifacts including figures."""
    def pipeline(root: Path):
        root.mkdir()
        files = {
            "world": root / "world.json",
            "sttg": root / "sttg.json",
            "tasks": root / "tasks.json",
            "transcripts": root / "tr.jsonl",
        }
        assert cli_main(["gen-world", "--topology", "factory", "--persons",
                         "90", "--seed", "7", "--out",
                         str(files["world"])]) == 0
        assert cli_main(["build-sttg", "--world", str(files["world"]),
                         "--out", str(files["sttg"])]) == 0
        assert cli_main(["gen-tasks", "--track", "all", "--world",
                         str(files["world"]), "--sttg", str(files["sttg"]),
                         "--seed", "42", "--out", str(files["tasks"])]) == 0
        assert cli_main(["run", "--agent", "greedy", "--tasks",
                         str(files["tasks"]), "--world", str(files["world"]),
                         "--seed", "0", "--out",
                         str(files["transcripts"])]) == 0
        report = root / "report"
        assert cli_main(["score", "--transcripts",
                         str(files["transcripts"]), "--out-dir",
                         str(report)]) == 0
        files["report"] = report / "report.json"
        files["csv"] = report / "per_task.csv"
        files["fig1"] = report / "figures" / "sr_curve.png"
        files["fig2"] = report / "figures" / "scores.png"
        return files

    first = pipeline(tmp_path / "run1")
    second = pipeline(tmp_path / "run2")
    for key in first:
        assert first[key].read_bytes() == second[key].read_bytes(), key
    print("\n[PASS] determinism: full pipeline byte-identical across runs "
          f"({len(first)} artifacts)")
