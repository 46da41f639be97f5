"""A seeded toy fire world standing in for RoboCupRescue, plus trace loading.

World rules, applied in this order by :meth:`World.tick` for cycle ``c``:

1. Scheduled ignitions and spread ignitions queued last cycle start burning
   at fieriness 1 (only buildings that never burned can ignite).
2. Brigades act in id order. A brigade standing on a burning building pours
   ``extinguish_rate`` fieriness units onto it. Otherwise it steps one grid
   cell towards the nearest burning building within ``sensing_radius``
   (ties: lowest building index; the axis with the larger gap moves first,
   x on equal gaps) or patrols (``random``: uniform among in-bounds
   neighbour cells; ``stay``: no move).
3. Fires with fieriness <= 0 become extinguished (``extinguished_value``).
   They are reported once more this cycle, then never again.
4. Fires that received no water grow by one level every ``growth_period``
   cycles of burning, up to ``max_fieriness``.
5. Each still-burning fire, in building order, tries its 4-neighbours in
   order W, E, N, S; an unburnt neighbour ignites next cycle with
   probability ``spread_probability`` (one draw per candidate).
6. FSFs are emitted: every brigade, then every burning or just-extinguished
   fire that is perceivable (any fire under ``perception="global"``, or
   within ``sensing_radius`` of some brigade under ``"brigades"``).

Building ``i`` sits at ``((i % width) * spacing, (i // width) * spacing)``;
its fire is ``fire#i``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ConfigError, FsfError, NonMonotoneTime, ParseError
from .fsf import FSF, Coord, fsf_from_json, make_fsf, parse_fsf
from .ontology import Ontology, default_ontology
from .rng import SplitMix64

UNBURNT = 0


@dataclass(frozen=True)
class Ignition:
    building: int
    cycle: int


@dataclass(frozen=True)
class BrigadeSpec:
    id: int
    start: tuple[int, int]
    patrol: str = "random"


@dataclass(frozen=True)
class WorldSpec:
    width: int = 10
    height: int = 10
    spacing: int = 10
    ignitions: tuple[Ignition, ...] = ()
    brigades: tuple[BrigadeSpec, ...] = ()
    spread_probability: float = 0.05
    extinguish_rate: int = 1
    seed: int = 0
    total_cycles: int = 100
    growth_period: int = 3
    max_fieriness: int = 3
    extinguished_value: int = 8
    sensing_radius: float = 30.0
    perception: str = "brigades"

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0 or self.spacing <= 0:
            raise ConfigError("grid dimensions must be positive")
        if not 0.0 <= self.spread_probability <= 1.0:
            raise ConfigError("spread_probability must lie in [0, 1]")
        if self.extinguish_rate < 1 or self.growth_period < 1 or self.max_fieriness < 1:
            raise ConfigError("extinguish_rate, growth_period and max_fieriness must be >= 1")
        if self.perception not in ("brigades", "global"):
            raise ConfigError("perception must be 'brigades' or 'global'")
        n = self.width * self.height
        for ig in self.ignitions:
            if not 0 <= ig.building < n:
                raise ConfigError(f"ignition building {ig.building} outside the grid")
            if not 0 <= ig.cycle < self.total_cycles:
                raise ConfigError(f"ignition cycle {ig.cycle} not below total_cycles")
        ids = [b.id for b in self.brigades]
        if len(set(ids)) != len(ids):
            raise ConfigError("duplicate brigade id")
        for b in self.brigades:
            if b.patrol not in ("random", "stay"):
                raise ConfigError(f"unknown patrol policy {b.patrol!r}")
            if not self.on_grid(b.start):
                raise ConfigError(f"brigade {b.id} does not start on a grid cell")

    def position(self, building: int) -> tuple[int, int]:
        return (building % self.width) * self.spacing, (building // self.width) * self.spacing

    def on_grid(self, pos) -> bool:
        x, y = pos
        return (x % self.spacing == 0 and y % self.spacing == 0
                and 0 <= x < self.width * self.spacing and 0 <= y < self.height * self.spacing)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ignitions"] = [[i.building, i.cycle] for i in self.ignitions]
        d["brigades"] = [{"id": b.id, "start": list(b.start), "patrol": b.patrol}
                         for b in self.brigades]
        return d

    @classmethod
    def from_dict(cls, doc: dict) -> "WorldSpec":
        doc = dict(doc)
        try:
            doc["ignitions"] = tuple(Ignition(int(b), int(c)) for b, c in doc.get("ignitions", []))
            doc["brigades"] = tuple(
                BrigadeSpec(int(b["id"]), tuple(b["start"]), b.get("patrol", "random"))
                for b in doc.get("brigades", []))
            return cls(**doc)
        except (TypeError, KeyError, ValueError) as exc:
            raise ConfigError(f"bad world spec: {exc}") from exc


def load_world(path) -> WorldSpec:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return WorldSpec.from_dict(doc)


@dataclass
class _Brigade:
    id: int
    x: int
    y: int
    patrol: str
    extinguishing: bool = False


class World:
    """Mutable world state for one seeded run of a :class:`WorldSpec`."""

    def __init__(self, spec: WorldSpec, ontology: Ontology | None = None):
        self.spec = spec
        self.ontology = ontology or default_ontology()
        self.rng = SplitMix64(spec.seed)
        n = spec.width * spec.height
        self.fieriness = [UNBURNT] * n
        self.ignited_at = [-1] * n
        self.extinguished = [False] * n
        self.pending: set[int] = set()
        self.brigades = [_Brigade(b.id, *b.start, b.patrol)
                         for b in sorted(spec.brigades, key=lambda b: b.id)]
        self.cycle = 0
        self._nbrs = [self._neighbours(i) for i in range(n)]
        # one checked FSF per kind vets the ontology; later ones reuse its class
        self._fire_cls = make_fsf("fire#0", [("fieriness", 1), ("inDangerNeighbours", 0),
                                             ("burningNeighbours", 0)], ontology=self.ontology).cls
        self._brigade_cls = make_fsf("brigade#0", [("extinguishing", 0)],
                                     ontology=self.ontology).cls

    # -- geometry ----------------------------------------------------------

    def neighbours(self, i: int) -> list[int]:
        return self._nbrs[i]

    def _neighbours(self, i: int) -> list[int]:
        w, h = self.spec.width, self.spec.height
        x, y = i % w, i // w
        out = []
        for dx, dy in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            nx, ny = x + dx, y + dy
            if 0 <= nx < w and 0 <= ny < h:
                out.append(ny * w + nx)
        return out

    def burning(self, i: int) -> bool:
        return not self.extinguished[i] and self.fieriness[i] > 0

    def unburnt(self, i: int) -> bool:
        return self.ignited_at[i] < 0

    def building_at(self, x: int, y: int) -> int:
        s = self.spec.spacing
        return (y // s) * self.spec.width + x // s

    def burning_neighbours(self, i: int) -> int:
        return sum(1 for j in self.neighbours(i) if self.burning(j))

    def in_danger_neighbours(self, i: int) -> int:
        return sum(1 for j in self.neighbours(i) if self.unburnt(j))

    def _dist2(self, b: _Brigade, i: int) -> int:
        px, py = self.spec.position(i)
        return (px - b.x) ** 2 + (py - b.y) ** 2

    # -- dynamics ----------------------------------------------------------

    def _ignite(self, i: int, cycle: int):
        if self.unburnt(i):
            self.fieriness[i] = 1
            self.ignited_at[i] = cycle

    def _sensed(self, b: _Brigade) -> list[int]:
        """Buildings within sensing radius of ``b``."""
        s = self.spec
        r = s.sensing_radius
        x0 = max(0, math.ceil((b.x - r) / s.spacing))
        x1 = min(s.width - 1, math.floor((b.x + r) / s.spacing))
        y0 = max(0, math.ceil((b.y - r) / s.spacing))
        y1 = min(s.height - 1, math.floor((b.y + r) / s.spacing))
        r2 = r * r
        return [i for gy in range(y0, y1 + 1) for i in range(gy * s.width + x0, gy * s.width + x1 + 1)
                if self._dist2(b, i) <= r2]

    def _move_brigade(self, b: _Brigade):
        s = self.spec
        targets = [(self._dist2(b, i), i) for i in self._sensed(b) if self.burning(i)]
        if targets:
            _, target = min(targets)
            tx, ty = s.position(target)
            dx, dy = tx - b.x, ty - b.y
            if abs(dx) >= abs(dy):
                b.x += s.spacing if dx > 0 else -s.spacing
            else:
                b.y += s.spacing if dy > 0 else -s.spacing
        elif b.patrol == "random":
            moves = [(b.x + dx, b.y + dy) for dx, dy in
                     ((-s.spacing, 0), (s.spacing, 0), (0, -s.spacing), (0, s.spacing))]
            moves = [m for m in moves if s.on_grid(m)]
            if moves:
                b.x, b.y = moves[self.rng.randbelow(len(moves))]

    def tick(self, cycle: int | None = None) -> list[FSF]:
        s = self.spec
        cycle = self.cycle if cycle is None else cycle
        if cycle != self.cycle:
            raise ValueError(f"world is at cycle {self.cycle}, asked for {cycle}")
        if cycle >= s.total_cycles:
            raise ValueError(f"cycle {cycle} beyond total_cycles {s.total_cycles}")
        for i in sorted(self.pending):
            self._ignite(i, cycle)
        self.pending.clear()
        for ig in s.ignitions:
            if ig.cycle == cycle:
                self._ignite(ig.building, cycle)

        n = len(self.fieriness)
        watered = [0] * n
        burning = [i for i in range(n) if self.burning(i)]
        for b in self.brigades:
            here = self.building_at(b.x, b.y)
            b.extinguishing = self.burning(here)
            if b.extinguishing:
                watered[here] += s.extinguish_rate
            else:
                self._move_brigade(b)

        just_out = []
        for i in burning:
            if watered[i]:
                self.fieriness[i] -= watered[i]
                if self.fieriness[i] <= 0:
                    self.fieriness[i] = s.extinguished_value
                    self.extinguished[i] = True
                    just_out.append(i)
            elif (cycle - self.ignited_at[i]) > 0 and (cycle - self.ignited_at[i]) % s.growth_period == 0:
                self.fieriness[i] = min(s.max_fieriness, self.fieriness[i] + 1)

        for i in range(n):
            if not self.burning(i):
                continue
            for j in self.neighbours(i):
                if self.unburnt(j) and j not in self.pending:
                    if self.rng.random() < s.spread_probability:
                        self.pending.add(j)

        out = [FSF(f"brigade#{b.id}", self._brigade_cls, (("extinguishing", int(b.extinguishing)),),
                   Coord(b.x, b.y), cycle) for b in self.brigades]
        just_out = set(just_out)
        if s.perception == "brigades":
            sensed = {i for b in self.brigades for i in self._sensed(b)}
        for i in range(n):
            if not (self.burning(i) or i in just_out):
                continue
            if s.perception == "brigades" and i not in sensed:
                continue
            out.append(FSF(
                f"fire#{i}", self._fire_cls,
                (("fieriness", self.fieriness[i]),
                 ("inDangerNeighbours", self.in_danger_neighbours(i)),
                 ("burningNeighbours", self.burning_neighbours(i))),
                Coord(*s.position(i)), cycle))
        self.cycle += 1
        return out


def tick_world(world: World, cycle: int) -> list[FSF]:
    return world.tick(cycle)


def generate_stream(spec: WorldSpec, cycles: int | None = None,
                    ontology: Ontology | None = None) -> dict[int, list[FSF]]:
    world = World(spec, ontology)
    n = spec.total_cycles if cycles is None else min(cycles, spec.total_cycles)
    return {c: world.tick(c) for c in range(n)}


# --- trace files ------------------------------------------------------------------

def parse_trace_lines(lines, path="<trace>", ontology: Ontology | None = None,
                      jsonl: bool = False) -> dict[int, list[FSF]]:
    batches: dict[int, list[FSF]] = {}
    last = None
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            fsf = fsf_from_json(json.loads(line), ontology) if jsonl else parse_fsf(line, ontology)
        except (FsfError, json.JSONDecodeError) as exc:
            raise ParseError(path, lineno, str(exc)) from exc
        if last is not None and fsf.time < last:
            raise NonMonotoneTime(path, lineno, f"time {fsf.time} after {last}")
        last = fsf.time
        batches.setdefault(fsf.time, []).append(fsf)
    return batches


def load_trace(path, ontology: Ontology | None = None) -> dict[int, list[FSF]]:
    """Read a ``.fsf`` or ``.jsonl`` trace into ``{cycle: [FSF, ...]}`` (ascending cycles)."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        return parse_trace_lines(fh, path, ontology, jsonl=path.suffix == ".jsonl")


# --- the scripted scenario -----------------------------------------------------------

@dataclass(frozen=True)
class PaperlikeScenario:
    world: WorldSpec
    trace: dict[int, list[FSF]]
    tracked_fire: str = "fire#75"
    tracked_location: tuple[int, int] = (50, 70)
    discovery_cycle: int = 5
    creation_cycle: int = 30
    extinguished_cycle: int = 48
    brigade_window: tuple[int, int] = (38, 46)
    cycles: int = 60
    notes: dict = field(default_factory=dict)


def _interpolate(keyframes):
    """Integer positions per cycle from ``[(cycle, (x, y)), ...]`` keyframes."""
    out = {}
    for (c0, p0), (c1, p1) in zip(keyframes, keyframes[1:]):
        for c in range(c0, c1):
            f = (c - c0) / (c1 - c0)
            out[c] = (round(p0[0] + f * (p1[0] - p0[0])), round(p0[1] + f * (p1[1] - p0[1])))
    c_last, p_last = keyframes[-1]
    out[c_last] = p_last
    return out


# brigade keyframes: (cycle, position), linearly interpolated in between.
# The tracked fire sits at (50, 70); the parking spots (50, 82) and (38, 82)
# are outside the 10-unit brigade radius, so every cycle from 37 to 49 is
# keyed explicitly. Brigades near the fire per cycle:
#   37:0 38:1 39:2 40:1 41:1 42:2 43:3 44:2 45:1 46:2 47:1 48:1
_AT, _PARK1, _PARK2 = (50, 70), (50, 82), (38, 82)
_BRIGADE_PATHS = {
    0: [(5, (10, 20)), (6, (10, 10)), (14, (10, 10)), (20, (20, 40)), (30, (20, 80)),
        (36, (50, 82)), (37, (50, 82))]
       + [(c, _AT) for c in range(38, 49)]
       + [(52, (50, 50)), (59, (90, 50))],
    1: [(5, (90, 20)), (6, (90, 10)), (16, (90, 10)), (24, (80, 60)), (30, (80, 85)), (36, (50, 82))]
       + [(c, _AT if c in (39, 42, 43, 46) else _PARK1) for c in range(37, 50)]
       + [(59, (70, 90))],
    2: [(5, (40, 10)), (12, (60, 30)), (22, (20, 60)), (30, (30, 80)), (36, (38, 82))]
       + [(c, _AT if c in (43, 44) else _PARK2) for c in range(37, 50)]
       + [(59, (10, 40))],
    3: [(5, (60, 10)), (18, (80, 60)), (24, (90, 80)), (34, (90, 90)), (59, (60, 90))],
}

# tracked fire fieriness by cycle; 8 marks extinguishment
_TRACKED_FIERINESS = {**{c: 1 for c in range(30, 33)}, **{c: 2 for c in range(33, 36)},
                      **{c: 3 for c in range(36, 45)}, 45: 2, 46: 2, 47: 1, 48: 8}
# extra same-cycle reports of the tracked fire (several observers)
_TRACKED_DUPLICATES = {32: 1}

# background fires: object, location, first seen, extinguished, peak fieriness
_BACKGROUND_FIRES = [
    ("fire#11", (10, 10), 5, 14, 2),
    ("fire#19", (90, 10), 5, 16, 3),
    ("fire#99", (90, 90), 18, 40, 3),
    ("fire#91", (10, 90), 24, 59, 3),
]


def _paperlike_trace(ontology: Ontology) -> dict[int, list[FSF]]:
    paths = {b: _interpolate(k) for b, k in _BRIGADE_PATHS.items()}
    trace: dict[int, list[FSF]] = {}
    fire_sites = {oid: loc for oid, loc, *_ in _BACKGROUND_FIRES}
    fire_sites["fire#75"] = (50, 70)
    for cycle in range(60):
        batch = []
        active = {}
        for oid, loc, start, end, peak in _BACKGROUND_FIRES:
            if start <= cycle <= end:
                level = 8 if cycle == end else min(peak, 1 + (cycle - start) // 3)
                active[oid] = level
        if cycle in _TRACKED_FIERINESS:
            active["fire#75"] = _TRACKED_FIERINESS[cycle]
        for b, path in sorted(paths.items()):
            if cycle not in path:
                continue
            pos = path[cycle]
            on_fire = any(fire_sites[o] == pos and lvl != 8 for o, lvl in active.items())
            ext = 1 if on_fire and (pos != (50, 70) or cycle >= 43) else 0
            batch.append(make_fsf(f"brigade#{b}", [("extinguishing", ext)], pos, cycle, ontology))
        for oid in sorted(active, key=lambda o: int(o.split("#")[1])):
            level = active[oid]
            fsf = make_fsf(oid, [("fieriness", level), ("inDangerNeighbours", 4),
                                 ("burningNeighbours", 0)], fire_sites[oid], cycle, ontology)
            batch.append(fsf)
            if oid == "fire#75":
                batch.extend([fsf] * _TRACKED_DUPLICATES.get(cycle, 0))
        if batch:
            trace[cycle] = batch
    return trace


def build_paperlike_scenario(ontology: Ontology | None = None) -> PaperlikeScenario:
    """Scripted 60-cycle trace following the narrative of the fire experiments.

    Brigades find the first fires at cycle 5; ``fire#75`` at (50, 70) ignites at
    cycle 30; brigades stand within 10 units of it every cycle from 38 to 48,
    in varying numbers, start extinguishing at 43 and put it out at 48.
    """
    onto = ontology or default_ontology()
    world = WorldSpec(
        width=10, height=10, spacing=10,
        ignitions=(Ignition(11, 3), Ignition(19, 4), Ignition(99, 17), Ignition(91, 23),
                   Ignition(75, 30)),
        brigades=tuple(BrigadeSpec(b, k[0][1], "stay") for b, k in _BRIGADE_PATHS.items()),
        spread_probability=0.0, extinguish_rate=1, seed=0, total_cycles=60)
    return PaperlikeScenario(world=world, trace=_paperlike_trace(onto))


def paperlike_trace_path() -> Path:
    return Path(str(resources.files("fsfmas.data").joinpath("paperlike.fsf")))
