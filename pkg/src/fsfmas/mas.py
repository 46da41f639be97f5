"""The representation layer: factual agents and the generative agent.

One :class:`RepresentationMAS` owns every factual agent. Each incoming FSF is
offered to all live agents; the closest one absorbs it if its total proximity
clears the creation threshold, otherwise a new agent is spawned around it.
Agents too far away to clear the threshold are skipped through a spatial grid,
which leaves the decision unchanged.
After routing, :meth:`RepresentationMAS.end_cycle` refreshes acquaintances,
steps every automaton and books activity records.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .atn import AgentView, AtnSpec, step_atn
from .config import BrigadeIndicatorParams, FireIndicatorParams, MasConfig
from .errors import InvalidFsf, MissingQualifier, StaleFsf
from .fsf import FSF
from .ontology import Family, Ontology
from .proximity import ProximityIndex, SpatialGrid, spatial_cutoff, total_proximity


class AgentKind(str, enum.Enum):
    PHENOMENON = "PhenomenonAgent"
    ACTOR = "ActorAgent"

    @classmethod
    def for_family(cls, family: Family) -> "AgentKind":
        return cls.PHENOMENON if family is Family.VIRTUAL else cls.ACTOR


class ActivityKind(str, enum.Enum):
    STATE_CHANGE = "StateChange"
    INDICATOR_CHANGE = "IndicatorChange"


@dataclass(frozen=True)
class ActivityRecord:
    cycle: int
    agent_id: int
    kind: ActivityKind


@dataclass(frozen=True)
class IndicatorEvent:
    """Everything needed to recompute one indicator update after the fact.

    ``pressure`` is the exponent argument (``x`` for fires, ``y`` for brigades)
    and ``proximity`` the additive term; creations log ``proximity = 0``.
    """

    cycle: int
    agent_id: int
    created: bool
    proximity: float
    pressure: float
    first_term: float
    ai: float
    pi: float


@dataclass(frozen=True)
class Absorbed:
    agent_id: int
    proximity: float


@dataclass(frozen=True)
class Created:
    agent_id: int


RoutingDecision = Absorbed | Created


@dataclass
class FactualAgent:
    agent_id: int
    kind: AgentKind
    cls: str
    history: list[FSF]
    creation_cycle: int
    state: int
    ai: float = 0.0
    pi: float = 0.0
    prev_ai: float = 0.0
    prev_pi: float = 0.0
    acquaintances: dict[int, float] = field(default_factory=dict)
    low_pi_streak: int = 0
    removed: bool = False
    dead: bool = False
    last_active_cycle: int = 0

    @property
    def current_fsf(self) -> FSF:
        return self.history[-1]

    def life_time(self, cycle: int) -> int:
        return cycle - self.creation_cycle

    def latest_qualifier(self, name: str, newest: FSF | None = None):
        """Most recent value of ``name`` in ``newest`` then the agent's history."""
        for f in ([newest] if newest is not None else []) + self.history[::-1]:
            v = f.qualifier(name)
            if v is not None:
                return v
        return None


# --- indicator formulas -------------------------------------------------------------

def plausibility(pressure: float, proximity: float, scale: float = 10.0,
                 coefficient: float = 0.05) -> tuple[float, float]:
    """(PI, first term) for ``scale * exp(-coefficient * pressure) + proximity``."""
    first = scale * math.exp(-coefficient * pressure)
    return first + proximity, first


def fire_pressure(burning_neighbours: float, fieriness: float, life_time: float,
                  brigades: int, brigade_weight: float = 5.0) -> float:
    return (burning_neighbours + fieriness + life_time) - brigade_weight * brigades


def brigade_pressure(idle_cycles: float, fires_in_radius: int, extinguishing: bool,
                     params: BrigadeIndicatorParams = BrigadeIndicatorParams()) -> float:
    return (params.k1 * idle_cycles - params.k2 * fires_in_radius
            - params.k3 * (1 if extinguishing else 0))


def _numeric(agent, fsf, name):
    v = agent.latest_qualifier(name, fsf) if agent is not None else fsf.qualifier(name)
    if v is None:
        raise MissingQualifier(f"{fsf.object_id}: no '{name}' qualifier available")
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise MissingQualifier(f"{fsf.object_id}: '{name}' is not numeric ({v!r})")
    return v


def update_indicators_fire(ai: float, proximity: float, new_fsf: FSF, life_time: int,
                           brigades_nearby: int, params: FireIndicatorParams = FireIndicatorParams(),
                           agent: FactualAgent | None = None):
    """Return ``(AI', PI', x, first_term)`` for a phenomenon agent absorbing ``new_fsf``.

    Qualifiers missing from ``new_fsf`` are taken from ``agent``'s history when
    an agent is supplied.
    """
    burning = _numeric(agent, new_fsf, "burningNeighbours")
    fieriness = _numeric(agent, new_fsf, "fieriness")
    x = fire_pressure(burning, fieriness, life_time, brigades_nearby, params.brigade_weight)
    pi, first = plausibility(x, proximity, params.scale, params.coefficient)
    return ai + proximity, pi, x, first


def update_indicators_brigade(ai: float, proximity: float, fires_in_radius: int,
                              extinguishing: bool, idle_cycles: int,
                              params: BrigadeIndicatorParams = BrigadeIndicatorParams()):
    """Return ``(AI', PI', y, first_term)`` for an actor agent."""
    y = brigade_pressure(idle_cycles, fires_in_radius, extinguishing, params)
    pi, first = plausibility(y, proximity, params.scale, params.coefficient)
    return ai + proximity, pi, y, first


# --- snapshots ----------------------------------------------------------------------

@dataclass(frozen=True)
class AgentSnapshot:
    agent_id: int
    kind: str
    cls: str
    state: int
    terminal: bool
    ai: float
    pi: float
    life_time: int
    history_length: int
    current_fsf: str
    acquaintances: tuple[tuple[int, float], ...]

    def to_json(self) -> dict:
        return {
            "agent_id": self.agent_id,
            "kind": self.kind,
            "class": self.cls,
            "state": self.state,
            "terminal": self.terminal,
            "ai": self.ai,
            "pi": self.pi,
            "lifetime": self.life_time,
            "history_length": self.history_length,
            "current_fsf": self.current_fsf,
            "acquaintances": [[i, p] for i, p in self.acquaintances],
        }


@dataclass(frozen=True)
class MasSnapshot:
    cycle: int
    agents: tuple[AgentSnapshot, ...]

    def to_json(self) -> dict:
        return {"cycle": self.cycle, "agents": [a.to_json() for a in self.agents]}

    def by_id(self) -> dict[int, AgentSnapshot]:
        return {a.agent_id: a for a in self.agents}


# --- the engine ---------------------------------------------------------------------

class RepresentationMAS:
    def __init__(self, config: MasConfig | None = None, ontology: Ontology | None = None,
                 atns: tuple[AtnSpec, AtnSpec] | None = None, start_cycle: int = 0):
        self.config = config or MasConfig()
        self.ontology = ontology or self.config.load_ontology()
        fire_atn, actor_atn = atns or self.config.load_atns()
        self.atns = {AgentKind.PHENOMENON: fire_atn, AgentKind.ACTOR: actor_atn}
        self.cycle = start_cycle
        self.agents: list[FactualAgent] = []
        self.activity_log: list[ActivityRecord] = []
        self.indicator_log: list[IndicatorEvent] = []
        self.ingested = 0
        self.cycle_agents: list[int] = []
        self.action_handlers: dict[str, callable] = {}
        self._index = ProximityIndex(self.ontology, self.config.proximity)
        self._live = np.zeros(0, dtype=bool)
        self._phenomenon = np.zeros(0, dtype=bool)
        self._brigade = np.zeros(0, dtype=bool)
        self._created_this_cycle: list[int] = []
        # agents farther than this can never clear the creation threshold
        self._cutoff = spatial_cutoff(self.config.creation_threshold,
                                      self.config.proximity.spatial_rate)
        cell = max(self.config.fire.brigade_radius, self.config.brigade.radius, 1.0)
        if math.isfinite(self._cutoff):
            cell = max(cell, self._cutoff)
        self._grid = SpatialGrid(cell)

    # -- queries -------------------------------------------------------------

    def live_agents(self) -> list[FactualAgent]:
        return [a for a in self.agents if not a.dead]

    def live_ids(self) -> np.ndarray:
        return np.flatnonzero(self._live[:len(self.agents)])

    def proximity_to(self, agent: FactualAgent, fsf: FSF) -> float:
        return total_proximity(fsf, agent.current_fsf, self.ontology, self.config.proximity).total

    def _within(self, mask: np.ndarray, fsf: FSF, radius: float) -> int:
        return sum(1 for aid in self._grid.near(fsf.location.x, fsf.location.y, radius)
                   if mask[aid])

    def brigades_near(self, fsf: FSF) -> int:
        return self._within(self._brigade, fsf, self.config.fire.brigade_radius)

    def fires_near(self, fsf: FSF) -> int:
        return self._within(self._phenomenon, fsf, self.config.brigade.radius)

    # -- routing -------------------------------------------------------------

    def best_candidate(self, fsf: FSF) -> tuple[int, float] | None:
        """(agent id, proximity) of the live agent closest to ``fsf``; ties go to the smallest id."""
        live = self.live_ids()
        if live.size == 0:
            return None
        row = self._index.row(fsf)[live]
        top = row.max()
        # exact scalar evaluation settles near-ties the vectorized path cannot
        contenders = live[row >= top - 1e-9]
        best_id, best_p = None, -math.inf
        for aid in contenders:
            p = self.proximity_to(self.agents[aid], fsf)
            if p > best_p:
                best_id, best_p = int(aid), p
        return best_id, best_p

    def _best_nearby(self, fsf: FSF) -> tuple[int, float] | None:
        # same decision as best_candidate whenever the winner clears the threshold
        radius = self._cutoff * (1 + 1e-9) + 1e-9
        best_id, best_p = None, -math.inf
        for aid in self._grid.near(fsf.location.x, fsf.location.y, radius):
            p = self.proximity_to(self.agents[aid], fsf)
            if p > best_p:
                best_id, best_p = aid, p
        return None if best_id is None else (best_id, best_p)

    def route_fsf(self, fsf: FSF) -> RoutingDecision:
        if not isinstance(fsf, FSF):
            raise InvalidFsf(f"not an FSF: {fsf!r}")
        if fsf.time != self.cycle:
            raise StaleFsf(f"{fsf.object_id} has time {fsf.time}, MAS is at cycle {self.cycle}")
        if fsf.cls.name not in self.ontology.classes:
            raise InvalidFsf(f"class {fsf.cls.name!r} unknown to the MAS ontology")
        if math.isfinite(self._cutoff):
            best = self._best_nearby(fsf)
        else:
            best = self.best_candidate(fsf)
        self.ingested += 1
        if best is not None and best[1] >= self.config.creation_threshold:
            self._absorb(self.agents[best[0]], fsf, best[1])
            return Absorbed(*best)
        return Created(self._create(fsf))

    def _grow_masks(self, n):
        if n > self._live.size:
            cap = max(2 * self._live.size, n, 64)
            for name in ("_live", "_phenomenon", "_brigade"):
                old = getattr(self, name)
                new = np.zeros(cap, dtype=bool)
                new[:old.size] = old
                setattr(self, name, new)

    def _indicators(self, agent: FactualAgent, fsf: FSF, p: float, created: bool):
        cycle = self.cycle
        if agent.kind is AgentKind.PHENOMENON:
            ai, pi, pressure, first = update_indicators_fire(
                agent.ai, p, fsf, agent.life_time(cycle), self.brigades_near(fsf),
                self.config.fire, agent)
        else:
            fires = self.fires_near(fsf)
            extinguishing = agent.latest_qualifier("extinguishing", fsf) == 1
            if fires or extinguishing:
                agent.last_active_cycle = cycle
            ai, pi, pressure, first = update_indicators_brigade(
                agent.ai, p, fires, extinguishing, cycle - agent.last_active_cycle,
                self.config.brigade)
        agent.ai, agent.pi = ai, pi
        self.indicator_log.append(
            IndicatorEvent(cycle, agent.agent_id, created, p, pressure, first, ai, pi))

    def _create(self, fsf: FSF) -> int:
        aid = len(self.agents)
        kind = AgentKind.for_family(fsf.cls.semantic.family)
        agent = FactualAgent(aid, kind, fsf.cls.name, [fsf], self.cycle,
                             self.atns[kind].initial, last_active_cycle=self.cycle)
        self._indicators(agent, fsf, 0.0, created=True)
        agent.prev_ai, agent.prev_pi = agent.ai, agent.pi
        self.agents.append(agent)
        self._grow_masks(aid + 1)
        self._index.put(aid, fsf)
        self._grid.move(aid, fsf.location.x, fsf.location.y)
        self._live[aid] = True
        self._phenomenon[aid] = kind is AgentKind.PHENOMENON
        self._brigade[aid] = fsf.cls.name in self.config.fire.brigade_classes
        self._created_this_cycle.append(aid)
        return aid

    def _absorb(self, agent: FactualAgent, fsf: FSF, p: float):
        self._indicators(agent, fsf, p, created=False)
        agent.history.append(fsf)
        self._index.put(agent.agent_id, fsf)
        self._grid.move(agent.agent_id, fsf.location.x, fsf.location.y)

    def remove_object(self, object_id: str) -> list[int]:
        """Flag live agents currently tracking ``object_id`` as withdrawn from the scene."""
        hit = [a.agent_id for a in self.live_agents() if a.current_fsf.object_id == object_id]
        for aid in hit:
            self.agents[aid].removed = True
        return hit

    # -- cycle ---------------------------------------------------------------

    def refresh_acquaintances(self):
        live = self.live_ids()
        for aid in live.tolist():
            self.agents[aid].acquaintances = {}
        if live.size < 2:
            return
        eps = self.config.acquaintance_prune_epsilon
        # pairs beyond this distance cannot reach |P| > eps
        radius = spatial_cutoff(eps, self.config.proximity.spatial_rate) * (1 + 1e-9) + 1e-9
        a, b = self._index.neighbours(live, radius)
        p = self._index.pairs(a, b)
        keep = np.abs(p) > eps
        a, b, p = a[keep].tolist(), b[keep].tolist(), p[keep].tolist()
        for i, j, v in zip(a, b, p):
            self.agents[i].acquaintances[j] = v

    def end_cycle(self) -> list[ActivityRecord]:
        cycle = self.cycle
        live = self.live_ids().tolist()
        created = set(self._created_this_cycle)
        self.refresh_acquaintances()
        theta_dead = self.config.thresholds.theta_dead
        records = []
        for aid in live:
            agent = self.agents[aid]
            agent.low_pi_streak = agent.low_pi_streak + 1 if agent.pi < theta_dead else 0
            spec = self.atns[agent.kind]
            view = AgentView(
                state=agent.state, ai=agent.ai, pi=agent.pi,
                d_ai=agent.ai - agent.prev_ai, d_pi=agent.pi - agent.prev_pi,
                life_time=agent.life_time(cycle), qualifiers=agent.current_fsf.qualifier_map,
                low_pi_streak=agent.low_pi_streak, removed=agent.removed)
            result = step_atn(spec, view)
            if aid in created or (agent.ai, agent.pi) != (agent.prev_ai, agent.prev_pi):
                records.append(ActivityRecord(cycle, aid, ActivityKind.INDICATOR_CHANGE))
            if result.new_state != agent.state:
                agent.state = result.new_state
                records.append(ActivityRecord(cycle, aid, ActivityKind.STATE_CHANGE))
                entered = spec.state(result.new_state)
                for action in entered.on_enter:
                    handler = self.action_handlers.get(action)
                    if handler is not None:
                        handler(self, agent, action)
                if entered.terminal:
                    agent.dead = True
                    self._live[aid] = False
                    self._grid.discard(aid)
            agent.prev_ai, agent.prev_pi = agent.ai, agent.pi
        self.activity_log.extend(records)
        self.cycle_agents = live
        self._created_this_cycle = []
        self.cycle += 1
        return records

    def run_cycle(self, observations: Iterable[FSF]) -> list[ActivityRecord]:
        observations = list(observations)
        for f in observations:
            if f.time != self.cycle:
                raise StaleFsf(f"{f.object_id} has time {f.time}, MAS is at cycle {self.cycle}")
        for f in observations:
            self.route_fsf(f)
        return self.end_cycle()

    # -- views ---------------------------------------------------------------

    def snapshot(self) -> MasSnapshot:
        agents = tuple(
            AgentSnapshot(
                agent_id=a.agent_id, kind=a.kind.value, cls=a.cls, state=a.state,
                terminal=a.dead, ai=a.ai, pi=a.pi, life_time=a.life_time(self.cycle),
                history_length=len(a.history), current_fsf=str(a.current_fsf),
                acquaintances=tuple(sorted(a.acquaintances.items())))
            for a in self.agents)
        return MasSnapshot(self.cycle, agents)

    def activity_counts(self) -> dict[int, tuple[int, int]]:
        """cycle -> (state changes, indicator changes)."""
        out: dict[int, list[int]] = {}
        for r in self.activity_log:
            c = out.setdefault(r.cycle, [0, 0])
            c[0 if r.kind is ActivityKind.STATE_CHANGE else 1] += 1
        return {k: (v[0], v[1]) for k, v in out.items()}
