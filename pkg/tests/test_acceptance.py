"""Acceptance criteria, one test per criterion.

Run with ``pytest tests/test_acceptance.py``; the terminal summary prints a
PASS/FAIL line per criterion.
"""

import collections
import csv
import json
import math
import random
import time
import tracemalloc

import pytest

from fsfmas import runner
from fsfmas.atn import default_atn
from fsfmas.cli import main
from fsfmas.fsf import make_fsf
from fsfmas.mas import AgentKind, RepresentationMAS, plausibility
from fsfmas.ontology import Ontology, data_path, default_ontology
from fsfmas.proximity import (SPATIAL_RATE, TEMPORAL_RATE, spatial_proximity,
                              temporal_proximity, total_proximity)
from fsfmas.scenario import BrigadeSpec, Ignition, WorldSpec, paperlike_trace_path

from streams import brute_force_route, lattice_stream, random_stream

criterion = pytest.mark.criterion


def sech2(x):
    return 1.0 / math.cosh(x) ** 2


# -- 1 -------------------------------------------------------------------------------

@criterion(1, "formula fidelity")
def test_formula_fidelity():
    rnd = random.Random(1)
    dts = [rnd.choice([-1, 1]) * rnd.uniform(0, 500) ** rnd.choice([1, 0.5]) for _ in range(10_000)]
    des = [rnd.uniform(0, 3000) ** rnd.choice([1, 0.5]) for _ in range(10_000)]
    start = time.perf_counter()
    pt = [temporal_proximity(d) for d in dts]
    pe = [spatial_proximity(d) for d in des]
    elapsed = time.perf_counter() - start
    assert max(abs(p - sech2(TEMPORAL_RATE * d / 2)) for p, d in zip(pt, dts)) <= 1e-12
    assert max(abs(p - sech2(SPATIAL_RATE * d / 2)) for p, d in zip(pe, des)) <= 1e-12
    assert temporal_proximity(0) == 1.0 and spatial_proximity(0) == 1.0
    assert temporal_proximity(5) == pytest.approx(0.786448, abs=1e-5)
    assert spatial_proximity(25) == pytest.approx(0.419974, abs=1e-5)
    assert elapsed < 1.0


# -- 2 -------------------------------------------------------------------------------

def _signed_ontology():
    doc = default_ontology().to_dict()
    doc["similarity"] = doc["similarity"] + [["Fire", "Civilian", -0.7], ["Road", "Building", -0.2]]
    return Ontology.from_dict(doc)


def _random_fsf(rnd, onto):
    prefix = rnd.choice(sorted(onto.prefixes))
    cls = onto.prefixes[prefix]
    names = sorted(onto.qualifiers_for(cls))
    q = [(n, rnd.randint(0, 2)) for n in rnd.sample(names, rnd.randint(0, len(names)))]
    loc = (rnd.randint(-200, 200), rnd.randint(-200, 200))
    return make_fsf(f"{prefix}#{rnd.randint(0, 3)}", q, loc, rnd.randint(0, 60), onto)


@criterion(2, "product rule, bounds, symmetry")
def test_product_rule():
    rnd = random.Random(2)
    for onto in (default_ontology(), _signed_ontology()):
        for _ in range(5_000):
            a, b = _random_fsf(rnd, onto), _random_fsf(rnd, onto)
            ab = total_proximity(a, b, onto)
            ba = total_proximity(b, a, onto)
            assert abs(ab.total - ab.semantic * ab.temporal * ab.spatial) <= 1e-12
            assert -1.0 <= ab.total <= 1.0
            assert (ab.semantic, ab.temporal, ab.spatial) == (ba.semantic, ba.temporal, ba.spatial)
            assert ab.total == ba.total


# -- 3 -------------------------------------------------------------------------------

@criterion(3, "routing oracle")
def test_routing_oracle():
    engine_time = 0.0
    ties = 0
    for seed in range(100):
        stream = random_stream(seed) if seed % 2 == 0 else lattice_stream(seed)
        n = sum(len(b) for b in stream.values())
        assert n <= 500
        mas = RepresentationMAS()
        for c in sorted(stream):
            for fsf in stream[c]:
                expected = brute_force_route(mas, fsf)
                live = [a for a in mas.agents if not a.dead]
                ps = sorted((mas.proximity_to(a, fsf) for a in live), reverse=True)
                ties += len(ps) > 1 and ps[0] == ps[1] >= mas.config.creation_threshold
                t0 = time.perf_counter()
                got = mas.route_fsf(fsf)
                engine_time += time.perf_counter() - t0
                assert got == expected, (seed, fsf)
            assert len(mas.live_ids()) <= 50
            t0 = time.perf_counter()
            mas.end_cycle()
            engine_time += time.perf_counter() - t0
        assert sum(len(a.history) for a in mas.agents) == n == mas.ingested
    assert ties > 0
    assert engine_time < 10.0


# -- 4 -------------------------------------------------------------------------------

def _replay_scripted(snapshots=False):
    from fsfmas.scenario import load_trace
    return runner.replay(load_trace(paperlike_trace_path()), snapshots=snapshots)


@criterion(4, "indicator equations")
def test_indicator_equations():
    runs = [_replay_scripted().mas,
            runner.simulate(WorldSpec.from_dict(json.loads(
                data_path("world_default.json").read_text()))).mas]
    for mas in runs:
        by_agent = collections.defaultdict(list)
        for ev in mas.indicator_log:
            by_agent[ev.agent_id].append(ev)
        for aid, events in by_agent.items():
            assert events[0].created and events[0].proximity == 0.0 and events[0].ai == 0.0
            total = 0.0
            for ev in events:
                total += ev.proximity
                assert abs(ev.ai - total) <= 1e-9
                recomputed = 10.0 * math.exp(-0.05 * ev.pressure) + ev.proximity
                assert abs(ev.pi - recomputed) <= 1e-9
                if ev.pressure == 0:
                    assert ev.first_term == 10.0
            agent = mas.agents[aid]
            assert (agent.ai, agent.pi) == (events[-1].ai, events[-1].pi)
    assert plausibility(0.0, 0.0) == (10.0, 10.0)

    # x = 4 + 1 + 0 - 5 * 1 = 0 for a fresh fire next to one brigade
    mas = RepresentationMAS()
    mas.route_fsf(make_fsf("brigade#0", [("extinguishing", 1)], (0, 0), 0))
    mas.route_fsf(make_fsf("fire#1", [("fieriness", 1), ("burningNeighbours", 4),
                                      ("inDangerNeighbours", 0)], (6, 8), 0))
    ev = mas.indicator_log[-1]
    assert ev.pressure == 0 and ev.first_term == 10.0 and ev.pi == 10.0


# -- 5 -------------------------------------------------------------------------------

def _series(output, aid):
    rows = [r.split(",") for r in output.agent_rows]
    return {int(r[0]): (int(r[4]), float(r[6])) for r in rows if int(r[1]) == aid}


@criterion(5, "scripted narrative")
def test_scripted_narrative():
    start = time.perf_counter()
    out = _replay_scripted()
    elapsed = time.perf_counter() - start
    mas = out.mas
    tracked = [a for a in mas.agents if a.history[0].object_id == "fire#75"]
    assert len(tracked) == 1
    agent = tracked[0]
    series = _series(out, agent.agent_id)
    states = {c: s for c, (s, _) in series.items()}
    pi = {c: p for c, (_, p) in series.items()}

    assert agent.creation_cycle == 30                                          # (i)
    reached = min(c for c, s in states.items() if s == 3)
    assert reached <= 32                                                       # (ii)
    peaks = [c for c in range(38, 47) if pi[c - 1] < pi[c] > pi[c + 1]]
    assert peaks                                                               # (iii)
    left = min(c for c, s in states.items() if c > reached and s != 3)
    assert left >= 48                                                          # (iv)
    n_dead = mas.config.thresholds.n_dead
    terminal = min(c for c, s in states.items() if mas.atns[AgentKind.PHENOMENON].is_terminal(s))
    assert terminal <= 48 + n_dead + 2                                         # (v)
    assert elapsed < 5.0


# -- 6 -------------------------------------------------------------------------------

def _activities_from_snapshots(lines):
    initial = {AgentKind.PHENOMENON.value: default_atn("fire").initial,
               AgentKind.ACTOR.value: default_atn("brigade").initial}
    prev = {}
    rows = []
    for cycle, line in enumerate(lines):
        snap = json.loads(line)
        assert snap["cycle"] == cycle + 1
        states = indicators = 0
        for a in snap["agents"]:
            before = prev.get(a["agent_id"])
            if before is None:
                indicators += 1
                states += a["state"] != initial[a["kind"]]
            elif not before["terminal"]:
                indicators += (a["ai"], a["pi"]) != (before["ai"], before["pi"])
                states += a["state"] != before["state"]
        rows.append((cycle, states, indicators, states + indicators))
        prev = {a["agent_id"]: a for a in snap["agents"]}
    return rows


@criterion(6, "activity dynamics")
def test_activity_dynamics(tmp_path):
    assert main(["replay", "--trace", str(paperlike_trace_path()), "--out", str(tmp_path),
                 "--snapshots"]) == 0
    with open(tmp_path / "activities.csv", newline="") as fh:
        table = [tuple(int(v) for v in r) for r in list(csv.reader(fh))[1:]]
    totals = {r[0]: r[3] for r in table}
    assert all(totals[c] == 0 for c in range(5))
    assert totals[5] > 0
    snaps = (tmp_path / "snapshots.jsonl").read_text().splitlines()
    assert _activities_from_snapshots(snaps) == table


# -- 7 -------------------------------------------------------------------------------

@criterion(7, "determinism")
def test_determinism(tmp_path):
    world = str(data_path("world_default.json"))
    dirs = [tmp_path / "a", tmp_path / "b", tmp_path / "c"]
    for d in dirs[:2]:
        assert main(["simulate", "--world", world, "--seed", "7", "--cycles", "100",
                     "--out", str(d), "--snapshots"]) == 0
    assert main(["rerun", "--manifest", str(dirs[0] / "manifest.json"), "--out", str(dirs[2])]) == 0
    for name in ("agents.csv", "activities.csv", "snapshots.jsonl"):
        blobs = {(d / name).read_bytes() for d in dirs}
        assert len(blobs) == 1, name


# -- 8 -------------------------------------------------------------------------------

def _scale_world():
    rnd = random.Random(8)
    side = 30
    # brigades sit on row 0; fires start at row 2, out of sensing range
    cells = rnd.sample(range(2 * side, side * side), 240)
    return WorldSpec(width=side, height=side, spacing=30,
                     ignitions=tuple(Ignition(c, 0) for c in sorted(cells)),
                     brigades=tuple(BrigadeSpec(i, (30 * 3 * i, 0), "stay") for i in range(10)),
                     spread_probability=0.0, seed=8, total_cycles=100, perception="global")


@criterion(8, "scale")
def test_scale():
    world = _scale_world()
    start = time.perf_counter()
    out = runner.simulate(world)
    elapsed = time.perf_counter() - start
    live = collections.Counter(int(r.split(",")[0]) for r in out.agent_rows)
    assert len(live) == 100 and min(live.values()) >= 200
    tracemalloc.start()
    try:
        runner.simulate(world)
        peak = tracemalloc.get_traced_memory()[1]
    finally:
        tracemalloc.stop()
    print(f"scale: {elapsed:.2f} s, peak {peak / 2**20:.1f} MiB, live {min(live.values())}")
    assert elapsed < 5.0
    assert peak < 256 * 2**20
