"""Closure spaces beyond the relation-first view: explicit singleton
closures, the near-only modal fragment, and its two matching
equivalences.

A finite closure space is given by the closure of each singleton (on a
finite carrier that determines the closure of every set).  Without
reachability operators, the right equivalence observes only "which
blocks can close over me"; it coincides with behavioural equivalence of
the subset-observation coalgebra, and quotient spaces preserve the
fragment's satisfaction.
"""

import spatialmin as sm

# an asymmetric space: b and c both close over a's neighbourhood chain
s = sm.FiniteClosureSpace(
    points=["a", "b", "c", "d"],
    singleton_closure={
        "a": ["a", "b"],
        "b": ["b", "c"],
        "c": ["c"],
        "d": ["d", "c"],
    },
    valuation={"a": {"mark"}},
)

print("closure({a}) =", sorted(s.closure(["a"])))
print("interior({b, c}) =", sorted(s.interior(["b", "c"])))

part = sm.iml_equivalence(s)
print("\nmodal-fragment equivalence blocks:")
for b in range(part.blocks):
    print(f"  block {b}:", [s.point_ids[i] for i in part.members(b)])

cf = sm.closure_functor_equivalence(s)
print("subset-observation refinement agrees:", part == cf)
print("passes the neighbourhood-transfer bisimulation check:",
      sm.is_gcm_bisimulation(s, part))

f = sm.iml_distinguishing_formula(s, "b", "c")
print("\nb vs c distinguished by:", sm.format_formula(f))
print("satisfied at:", sorted(sm.iml_sat(s, f)))

q = sm.quotient_space(s, part)
print(f"\nquotient space has {q.n} points; singleton closures:")
for p in q.point_ids:
    print(f"  {p}: {sorted(q.singleton_closure(p))}")

# satisfaction of the fragment transfers along the projection
proj = {p: f"b{part.of(s.index_of(p))}" for p in s.point_ids}
for text in ["near(mark)", "near(near(mark))", "!near(mark) & !mark"]:
    g = sm.parse(text)
    up = sm.iml_sat(s, g)
    down = sm.iml_sat(q, g)
    assert all((x in up) == (proj[x] in down) for x in s.point_ids)
    print(f"{text:24s} -> {sorted(up)}  (preserved in the quotient)")
