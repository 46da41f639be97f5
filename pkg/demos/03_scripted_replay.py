"""
Replaying the scripted fire scenario
====================================

Feed the shipped trace through the MAS and follow the fire it was built
around: creation, escalation, the brigades' visit, and extinction.
"""

import sys
import tempfile
from pathlib import Path

from fsfmas import runner
from fsfmas.plotting import plot_activities, plot_agent
from fsfmas.scenario import build_paperlike_scenario, load_trace, paperlike_trace_path

out_dir = Path(sys.argv[1] if len(sys.argv) > 1 else tempfile.mkdtemp(prefix="fsfmas-"))
scenario = build_paperlike_scenario()
out = runner.replay(load_trace(paperlike_trace_path()))
runner.write_outputs(out, out_dir)

# which agent ended up representing the tracked fire?
agent = next(a for a in out.mas.agents if a.history[0].object_id == scenario.tracked_fire)
print(f"{scenario.tracked_fire} is agent {agent.agent_id}, created at cycle {agent.creation_cycle}")

# state and indicators per cycle, straight from the agents table
for row in out.agent_rows:
    cycle, aid, _, _, state, ai, pi, _ = row.split(",")
    if int(aid) == agent.agent_id:
        print(f"  cycle {cycle:>2}  state {state}  AI {float(ai):6.2f}  PI {float(pi):6.2f}")

# activity starts with the first observations
totals = [int(r.split(",")[3]) for r in out.activity_rows]
print("activity, cycles 0-9:", totals[:10])

for path in plot_agent(out_dir, agent.agent_id) + [plot_activities(out_dir)]:
    print("wrote", path)
