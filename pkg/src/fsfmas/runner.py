"""Drive the MAS from a world or a trace and write the time-series outputs.

Everything the command line does is available here; the CLI only parses
flags and maps exceptions to exit codes.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Mapping

from . import __version__
from .config import MasConfig, load_config
from .errors import ConfigError
from .fsf import FSF
from .mas import ActivityKind, RepresentationMAS
from .scenario import World, WorldSpec, load_trace, load_world

AGENTS_CSV = "agents.csv"
ACTIVITIES_CSV = "activities.csv"
SNAPSHOTS_JSONL = "snapshots.jsonl"
MANIFEST_JSON = "manifest.json"
AGENTS_HEADER = "cycle,agent_id,kind,class,state,ai,pi,lifetime"
ACTIVITIES_HEADER = "cycle,state_changes,indicator_changes,total"


@dataclass
class RunOutput:
    mas: RepresentationMAS
    agent_rows: list[str] = field(default_factory=list)
    activity_rows: list[str] = field(default_factory=list)
    snapshots: list[str] | None = None

    def agents_csv(self) -> str:
        return "\n".join([AGENTS_HEADER, *self.agent_rows]) + "\n"

    def activities_csv(self) -> str:
        return "\n".join([ACTIVITIES_HEADER, *self.activity_rows]) + "\n"

    def snapshots_jsonl(self) -> str:
        return "".join(s + "\n" for s in self.snapshots or [])


def _dump(obj) -> str:
    return json.dumps(obj, separators=(",", ":"))


def run_batches(batch_for: Callable[[int], Iterable[FSF]], cycles: int,
                mas: RepresentationMAS, snapshots: bool = False) -> RunOutput:
    out = RunOutput(mas, snapshots=[] if snapshots else None)
    for _ in range(cycles):
        cycle = mas.cycle
        records = mas.run_cycle(batch_for(cycle))
        n_state = sum(1 for r in records if r.kind is ActivityKind.STATE_CHANGE)
        n_ind = len(records) - n_state
        out.activity_rows.append(f"{cycle},{n_state},{n_ind},{n_state + n_ind}")
        for aid in mas.cycle_agents:
            a = mas.agents[aid]
            out.agent_rows.append(
                f"{cycle},{aid},{a.kind.value},{a.cls},{a.state},{a.ai:.6f},{a.pi:.6f},"
                f"{a.life_time(cycle)}")
        if snapshots:
            out.snapshots.append(_dump(mas.snapshot().to_json()))
    return out


def simulate(world: WorldSpec, cycles: int | None = None, config: MasConfig | None = None,
             seed: int | None = None, snapshots: bool = False) -> RunOutput:
    """Run the toy world for ``cycles`` cycles (default: its ``total_cycles``)."""
    if seed is not None:
        world = replace(world, seed=seed)
    if cycles is not None and cycles > world.total_cycles:
        world = replace(world, total_cycles=cycles)
    n = world.total_cycles if cycles is None else cycles
    mas = RepresentationMAS(config)
    w = World(world, mas.ontology)
    return run_batches(w.tick, n, mas, snapshots)


def replay(trace: Mapping[int, list[FSF]], config: MasConfig | None = None,
           cycles: int | None = None, snapshots: bool = False) -> RunOutput:
    """Feed a cycle-indexed trace; runs up to its last cycle unless ``cycles`` is given."""
    n = (max(trace) + 1 if trace else 0) if cycles is None else cycles
    mas = RepresentationMAS(config)
    return run_batches(lambda c: trace.get(c, []), n, mas, snapshots)


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_outputs(output: RunOutput, out_dir) -> list[str]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = {AGENTS_CSV: output.agents_csv(), ACTIVITIES_CSV: output.activities_csv()}
    if output.snapshots is not None:
        files[SNAPSHOTS_JSONL] = output.snapshots_jsonl()
    for name, text in files.items():
        with open(out_dir / name, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return list(files)


def write_manifest(out_dir, command: str, inputs: dict, seed, cycles, snapshots: bool,
                   emitted: list[str]) -> Path:
    out_dir = Path(out_dir)
    inputs = {k: (str(Path(v).resolve()) if v else None) for k, v in inputs.items()}
    manifest = {
        "engine": "fsfmas",
        "engine_version": __version__,
        "command": command,
        "inputs": inputs,
        "input_sha256": {k: sha256_file(v) for k, v in inputs.items() if v},
        "seed": seed,
        "cycles": cycles,
        "snapshots": snapshots,
        "outputs": {name: sha256_file(out_dir / name) for name in emitted},
    }
    path = out_dir / MANIFEST_JSON
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return path


def _config(path) -> MasConfig | None:
    return load_config(path) if path else None


def run_simulate(world_path, out_dir, config_path=None, seed=None, cycles=None,
                 snapshots=False) -> RunOutput:
    output = simulate(load_world(world_path), cycles, _config(config_path), seed, snapshots)
    emitted = write_outputs(output, out_dir)
    write_manifest(out_dir, "simulate", {"world": world_path, "config": config_path},
                   seed, cycles, snapshots, emitted)
    return output


def run_replay(trace_path, out_dir, config_path=None, cycles=None, snapshots=False) -> RunOutput:
    config = _config(config_path)
    ontology = config.load_ontology() if config else None
    output = replay(load_trace(trace_path, ontology), config, cycles, snapshots)
    emitted = write_outputs(output, out_dir)
    write_manifest(out_dir, "replay", {"trace": trace_path, "config": config_path},
                   None, cycles, snapshots, emitted)
    return output


def run_from_manifest(manifest_path, out_dir, check_inputs: bool = True) -> RunOutput:
    """Repeat the run recorded in a manifest, writing into ``out_dir``."""
    doc = json.loads(Path(manifest_path).read_text(encoding="utf-8"))
    inputs = doc["inputs"]
    if check_inputs:
        for key, digest in doc.get("input_sha256", {}).items():
            if sha256_file(inputs[key]) != digest:
                raise ConfigError(f"input {key} ({inputs[key]}) changed since the recorded run")
    if doc["command"] == "simulate":
        return run_simulate(inputs["world"], out_dir, inputs.get("config"), doc["seed"],
                            doc["cycles"], doc["snapshots"])
    if doc["command"] == "replay":
        return run_replay(inputs["trace"], out_dir, inputs.get("config"), doc["cycles"],
                          doc["snapshots"])
    raise ConfigError(f"unknown command {doc['command']!r} in manifest")
