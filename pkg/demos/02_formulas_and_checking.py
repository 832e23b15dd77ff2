"""The formula language and the model checker.

Formulas combine atoms, boolean connectives and two reachability
operators: reachFwd(f, g) holds where a path leads to an f-point with
all strictly-intermediate points satisfying g, and reachBwd is the
mirror image ("is reached from").  near, surrounded and propagate are
sugar on top.  Evaluation returns the full satisfaction set at once.
"""

import spatialmin as sm

# a 1x7 corridor: fire at one end, a door in the middle, exit at the other
ids = [f"c{i}" for i in range(7)]
edges = []
for a, b in zip(ids, ids[1:]):
    edges.extend([(a, b), (b, a)])
m = sm.Model(ids, edges, {
    "c0": {"fire"},
    "c3": {"door"},
    "c6": {"exit"},
})

for text in [
    "near(fire)",
    "reachFwd(exit, !door)",
    "surrounded(fire, door)",
    "propagate(fire, !door)",
]:
    f = sm.parse(text)
    result = sm.sat(m, f)
    print(f"{text:28s} -> {sorted(result.sat.ids())}")

print()
print("desugared near(fire):", sm.format_formula(sm.desugar(sm.parse("near(fire)"))))

# the brute-force oracle enumerates step sequences literally and must agree
f = sm.parse("surrounded(fire, door)")
assert sm.sat_oracle(m, f).sat == sm.sat(m, f).sat
print("oracle agrees with the fixpoint checker on this model.")

# reachability with a blocked corridor: nothing behind the door is reachable
# from the fire without crossing it
blocked = sm.sat(m, sm.parse("reachBwd(fire, !door)"))
print("reachBwd(fire, !door)       ->", sorted(blocked.sat.ids()))
assert "c6" not in blocked.sat
