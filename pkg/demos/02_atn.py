"""
Agent automata
==============

Load the shipped fire automaton, print it, and drive it by hand.
"""

from fsfmas.atn import AgentView, default_atn, parse_atn, step_atn

fire = default_atn("fire")
print(fire.to_text())

# walk a fire agent through its life: growth, a dip, then extinction
views = [
    AgentView(state=1, ai=0.0, pi=8.6),
    AgentView(state=2, ai=1.0, pi=8.0, d_ai=1.0, d_pi=-0.6),
    AgentView(state=2, ai=2.9, pi=7.5, d_ai=1.9, d_pi=-0.5),
    AgentView(state=3, ai=3.9, pi=9.1, d_ai=1.0, d_pi=1.6),
    AgentView(state=3, ai=4.9, pi=6.0, d_ai=1.0, d_pi=-3.1, qualifiers={"fieriness": 8}),
]
for v in views:
    r = step_atn(fire, v)
    via = "" if r.transition is None else f" via {r.transition.source}->{r.transition.target}"
    print(f"state {v.state} -> {r.new_state}{via}")

# thresholds are parameters, so a stricter variant is one override away
strict = default_atn("fire", {"theta_ai": 4})
print(step_atn(strict, views[2]).new_state, "with theta_ai = 4")

# or write an automaton from scratch
toy = parse_atn("""
initial 1
state 1 Watching
state 2 Alarmed terminal
transition 1 -> 2 when PI > 9 OR qualifier(fieriness) >= 3
""")
print(step_atn(toy, AgentView(state=1, pi=9.5)).new_state)
