import math

import pytest

from fsfmas.config import MasConfig, config_from_dict, load_config
from fsfmas.errors import ConfigError, MissingQualifier, StaleFsf
from fsfmas.fsf import make_fsf
from fsfmas.mas import (Absorbed, ActivityKind, AgentKind, Created, RepresentationMAS,
                        brigade_pressure, fire_pressure, plausibility,
                        update_indicators_brigade, update_indicators_fire)
from fsfmas.ontology import data_path

from streams import brute_force_route, random_stream


def fire(oid="fire#14", loc=(20, 25), t=7, fieriness=1, burning=2, danger=3):
    return make_fsf(oid, [("fieriness", fieriness), ("inDangerNeighbours", danger),
                          ("burningNeighbours", burning)], loc, t)


def brigade(oid="brigade#0", loc=(0, 0), t=0, ext=0):
    return make_fsf(oid, [("extinguishing", ext)], loc, t)


# -- routing ---------------------------------------------------------------------

def test_empty_mas_creates_agent_zero():
    mas = RepresentationMAS(start_cycle=7)
    assert mas.route_fsf(fire()) == Created(0)


def test_same_fire_next_cycle_is_absorbed():
    mas = RepresentationMAS(start_cycle=7)
    mas.run_cycle([fire()])
    d = mas.route_fsf(fire(t=8))
    assert isinstance(d, Absorbed) and d.agent_id == 0
    assert d.proximity == pytest.approx(0.990066, abs=1e-6)
    assert mas.agents[0].history[-1].time == 8


def test_distant_fire_spawns_new_agent():
    mas = RepresentationMAS()
    mas.route_fsf(fire(t=0))
    assert mas.route_fsf(fire("fire#15", loc=(150, 150), t=0)) == Created(1)


def test_tie_break_smallest_id():
    mas = RepresentationMAS(MasConfig(creation_threshold=-1.0))
    # two distinct agents with identical current FSF contents apart from id
    mas.route_fsf(fire("fire#1", loc=(0, 0), t=0))
    mas.route_fsf(fire("fire#2", loc=(500, 500), t=0))
    mas.end_cycle()
    mas.route_fsf(fire("fire#1", loc=(0, 0), t=1))
    mas.route_fsf(fire("fire#2", loc=(0, 0), t=1))
    probe = fire("fire#3", loc=(0, 0), t=1)
    assert mas.route_fsf(probe).agent_id == 0


def test_stale_fsf():
    mas = RepresentationMAS()
    with pytest.raises(StaleFsf):
        mas.route_fsf(fire(t=3))
    with pytest.raises(StaleFsf):
        mas.run_cycle([fire(t=1)])


@pytest.mark.parametrize("seed", range(5))
def test_routing_matches_brute_force_small(seed):
    mas = RepresentationMAS()
    stream = random_stream(seed, n_fsf=120, cycles=12)
    for c in range(12):
        for f in stream[c]:
            expected = brute_force_route(mas, f)
            assert mas.route_fsf(f) == expected
        mas.end_cycle()
    assert sum(len(a.history) for a in mas.agents) == 120


# -- indicators ------------------------------------------------------------------

def test_fire_pi_reference_qualifiers():
    x = fire_pressure(2, 1, 0, 0)
    assert x == 3
    pi, first = plausibility(x, 0.0)
    assert pi == pytest.approx(8.607080, abs=1e-6)


def test_fire_pi_zero_pressure_is_ten():
    x = fire_pressure(2, 1, 7, 2)
    assert x == 0
    assert plausibility(x, 0.0) == (10.0, 10.0)


def test_fire_ai_additive():
    ai, pi, x, first = update_indicators_fire(3.0, 1.0, fire(burning=2, fieriness=1), 0, 0)
    assert ai == 4.0
    assert pi == pytest.approx(10 * math.exp(-0.15) + 1.0)


def test_fire_missing_qualifier():
    with pytest.raises(MissingQualifier):
        update_indicators_fire(0.0, 0.0, make_fsf("fire#1", (), (0, 0), 0), 0, 0)


def test_brigade_pi_examples():
    _, pi, y, _ = update_indicators_brigade(0.0, 0.0, 0, False, 10)
    assert y == 10 and pi == pytest.approx(6.065307, abs=1e-6)
    assert brigade_pressure(0, 0, False) == 0
    assert update_indicators_brigade(0.0, 0.0, 0, False, 0)[1] == 10.0
    ai, pi, y, _ = update_indicators_brigade(1.0, 0.5, 2, True, 0)
    assert y == -7 and ai == 1.5
    assert pi == pytest.approx(14.690675, abs=1e-6)


def test_creation_indicators():
    mas = RepresentationMAS()
    mas.route_fsf(fire(t=0))
    a = mas.agents[0]
    assert a.kind is AgentKind.PHENOMENON
    assert a.ai == 0.0
    assert a.pi == pytest.approx(10 * math.exp(-0.05 * 3))


def test_brigades_nearby_lower_fire_pressure():
    mas = RepresentationMAS()
    mas.route_fsf(brigade(loc=(20, 30), t=0))
    mas.route_fsf(brigade("brigade#1", loc=(25, 25), t=0))
    mas.route_fsf(brigade("brigade#2", loc=(80, 80), t=0))
    mas.route_fsf(fire(t=0))
    ev = mas.indicator_log[-1]
    assert ev.pressure == 3 - 5 * 2


def test_brigade_idle_counter():
    mas = RepresentationMAS()
    for c in range(4):
        mas.run_cycle([brigade(loc=(0, 0), t=c)])
    assert [e.pressure for e in mas.indicator_log] == [0, 1, 2, 3]


# -- cycles ----------------------------------------------------------------------

def test_empty_cycle_no_records():
    mas = RepresentationMAS()
    mas.run_cycle([fire(t=0)])
    mas.run_cycle([])
    assert mas.run_cycle([]) == []


def test_single_new_fire_two_records():
    mas = RepresentationMAS()
    recs = mas.run_cycle([fire(t=0)])
    assert [r.kind for r in recs] == [ActivityKind.INDICATOR_CHANGE, ActivityKind.STATE_CHANGE]
    assert mas.agents[0].state == 2
    assert mas.cycle == 1


def test_fire_death_and_absorption():
    mas = RepresentationMAS()
    for c in range(3):
        mas.run_cycle([fire(t=c)])
    mas.run_cycle([fire(t=3, fieriness=8)])
    a = mas.agents[0]
    assert a.state == 4 and a.dead
    frozen = (a.ai, a.pi, a.state, dict(a.acquaintances))
    # a later observation of the same object cannot reach the dead agent
    assert mas.route_fsf(fire(t=4)) == Created(1)
    mas.end_cycle()
    for c in range(5, 8):
        recs = mas.run_cycle([fire(t=c)])
        assert all(r.agent_id != 0 for r in recs)
    assert (a.ai, a.pi, a.state, dict(a.acquaintances)) == frozen


def test_low_pi_death():
    cfg = config_from_dict({"thresholds": {"theta_dead": 100.0, "n_dead": 2}})
    mas = RepresentationMAS(cfg)
    states = []
    for c in range(4):
        mas.run_cycle([fire(t=c)] if c == 0 else [])
        states.append(mas.agents[0].state)
    assert states == [2, 4, 4, 4]


def test_brigade_removal_kills_agent():
    mas = RepresentationMAS()
    mas.run_cycle([brigade(t=0)])
    assert mas.remove_object("brigade#0") == [0]
    mas.run_cycle([])
    assert mas.agents[0].dead and mas.agents[0].state == 4


def test_acquaintances():
    mas = RepresentationMAS()
    mas.run_cycle([fire(t=0), fire("fire#2", loc=(40, 25), t=0),
                   fire("fire#3", loc=(900, 900), t=0)])
    a0, a1, a2 = mas.agents
    assert set(a0.acquaintances) == {1}
    assert a0.acquaintances[1] == pytest.approx(a1.acquaintances[0])
    assert a2.acquaintances == {}
    eps_cfg = MasConfig(acquaintance_prune_epsilon=0.0)
    mas = RepresentationMAS(eps_cfg)
    mas.run_cycle([fire(t=0), fire("fire#3", loc=(9000, 9000), t=0)])
    # the kernel underflows to exactly 0 at this distance
    assert mas.agents[0].acquaintances == {}


def test_activity_counts_against_snapshots():
    mas = RepresentationMAS()
    stream = random_stream(3, n_fsf=200, cycles=20)
    before = mas.snapshot()
    for c in range(20):
        recs = mas.run_cycle(stream[c])
        after = mas.snapshot()
        old = before.by_id()
        expected = 0
        for a in after.agents:
            if a.agent_id not in old:
                expected += 1 + (a.state != 1)
            elif not old[a.agent_id].terminal:
                o = old[a.agent_id]
                expected += (a.state != o.state) + ((a.ai, a.pi) != (o.ai, o.pi))
        assert len(recs) == expected
        before = after


def test_ai_recurrence_and_conservation():
    mas = RepresentationMAS()
    stream = random_stream(9, n_fsf=300, cycles=25)
    for c in range(25):
        mas.run_cycle(stream[c])
    assert sum(len(a.history) for a in mas.agents) == mas.ingested == 300
    for a in mas.agents:
        events = [e for e in mas.indicator_log if e.agent_id == a.agent_id]
        assert events[0].created
        assert a.ai == pytest.approx(sum(e.proximity for e in events), abs=1e-9)


# -- snapshots -------------------------------------------------------------------

def test_snapshot_empty_and_immutable():
    mas = RepresentationMAS()
    assert mas.snapshot().agents == ()
    mas.run_cycle([fire(t=0)])
    snap = mas.snapshot()
    mas.run_cycle([fire(t=1)])
    assert snap.agents[0].history_length == 1
    with pytest.raises(AttributeError):
        snap.agents[0].ai = 3.0


def test_snapshot_deterministic():
    def run():
        mas = RepresentationMAS()
        stream = random_stream(4, n_fsf=150, cycles=15)
        for c in range(15):
            mas.run_cycle(stream[c])
        return mas.snapshot().to_json()
    assert run() == run()


# -- config ----------------------------------------------------------------------

def test_shipped_config_equals_defaults():
    assert load_config(data_path("mas_config.json")) == MasConfig()


@pytest.mark.parametrize("doc", [
    {"creation_threshold": 2.0},
    {"fire": {"brigade_radius": 0}},
    {"bogus": 1},
    {"thresholds": {"theta_zz": 1}},
])
def test_bad_config(doc):
    with pytest.raises(ConfigError):
        config_from_dict(doc)


@pytest.mark.parametrize("theta", [-0.2, 0.0, 0.05, 0.6])
def test_routing_matches_brute_force_any_threshold(theta):
    # theta <= 0 takes the full scan, theta > 0 the spatial shortcut
    mas = RepresentationMAS(MasConfig(creation_threshold=theta))
    stream = random_stream(11, n_fsf=150, cycles=10)
    for c in range(10):
        for f in stream[c]:
            expected = brute_force_route(mas, f)
            assert mas.route_fsf(f) == expected
        mas.end_cycle()


def test_acquaintances_match_full_matrix():
    mas = RepresentationMAS()
    stream = random_stream(4, n_fsf=200, cycles=8)
    for c in range(8):
        mas.run_cycle(stream[c])
        live = mas.live_ids()
        m = mas._index.matrix(live)
        for r, aid in enumerate(live.tolist()):
            expect = {int(live[k]): m[r, k] for k in range(len(live))
                      if k != r and abs(m[r, k]) > mas.config.acquaintance_prune_epsilon}
            assert mas.agents[aid].acquaintances == expect
