"""Closure models from scratch: points, edges, closure and interior.

A model is a finite set of points with a directed relation and an
atomic-proposition valuation.  The closure of a set A adds every point
some member of A steps to; interior is the dual.  Run this file to see
the operators on a four-point model whose relation is deliberately
asymmetric: two "source" points x1', x2' each feed one "sink".
"""

import spatialmin as sm

m = sm.Model(
    points=["x1", "x2", "x1p", "x2p"],
    edges=[("x1p", "x1"), ("x2p", "x2")],
    valuation={"x1p": {"p"}},
)

print("points:", m.point_ids)
print("atoms:", sorted(m.atoms))

a = m.point_set(["x1p"])
print("\nclosure({x1p}) =", sorted(m.closure(a).ids()))
print("closure adds the successor x1 and keeps the set itself.")

s = m.point_set(["x1", "x1p"])
print("\ninterior({x1, x1p}) =", sorted(m.interior(s).ids()))
print("x1p survives: nothing outside the set closes over it.")

print("\none-step neighbourhoods:")
for p in m.point_ids:
    print(
        f"  {p}: forward={sorted(m.forward_closure(p).ids())}"
        f" backward={sorted(m.backward_closure(p).ids())}"
    )

print("\npath prefixes (stuttering allowed):")
for seq in (["x1p", "x1", "x1"], ["x1", "x1p"]):
    print(f"  {seq}: {m.is_path_prefix(seq)}")

# the axioms the closure operator obeys, spot-checked
empty = m.empty_set()
full = m.full_set()
assert m.closure(empty).is_empty()
assert a.issubset(m.closure(a))
assert m.closure(a | s) == m.closure(a) | m.closure(s)
assert m.interior(full) == full
print("\ngroundedness, extensivity, additivity, duality: all hold.")
