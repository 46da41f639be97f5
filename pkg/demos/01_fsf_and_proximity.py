"""
FSFs and proximity
==================

Parse an observation, look at its class, and compare it with a few others.
"""

from fsfmas import default_ontology, parse_fsf, serialize_fsf
from fsfmas.proximity import spatial_proximity, temporal_proximity, total_proximity

onto = default_ontology()

# one fire observed at cycle 7
f = parse_fsf("(fire#14, fieriness, 1, inDangerNeighbours, 3, burningNeighbours, 2, "
              "localisation, 20|25, time, 7)", onto)
print(f.cls.name, f.cls.semantic, f.qualifier_map)
print(serialize_fsf(f))

# the two kernels are 1 at zero and decay smoothly
for d in (0, 1, 5, 10, 25, 50):
    print(f"d={d:3d}  P_t={temporal_proximity(d):.6f}  P_e={spatial_proximity(d):.6f}")

# the same fire one cycle later, a neighbouring fire, and a brigade beside it
later = parse_fsf("(fire#14, fieriness, 2, localisation, 20|25, time, 8)", onto)
other = parse_fsf("(fire#15, fieriness, 1, burningNeighbours, 2, localisation, 30|25, time, 7)", onto)
brigade = parse_fsf("(brigade#3, extinguishing, 1, localisation, 22|25, time, 7)", onto)

for g in (later, other, brigade):
    p = total_proximity(f, g, onto)
    print(f"{g.object_id:10s} semantic={p.semantic:.3f} temporal={p.temporal:.3f} "
          f"spatial={p.spatial:.3f} total={p.total:.3f}")
