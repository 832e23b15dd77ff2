"""Shared builders: the figure models, random models/spaces/formulas,
and a brute-force isomorphism check for small models."""

from __future__ import annotations

import itertools
import random

import numpy as np
import pytest

import spatialmin as sm

RED = (255, 0, 0)
BLUE = (0, 0, 255)
COLOUR_MAP = {"#ff0000": "red", "#0000ff": "blue"}


def colour_grid(h, w, red_cells):
    px = np.zeros((h, w, 3), dtype=np.uint8)
    px[:, :] = BLUE
    for r, c in red_cells:
        px[r, c] = RED
    return px


def grid_model(h, w, red_cells, connectivity="orthodiagonal"):
    opts = sm.ImageOptions(connectivity=connectivity, colour_atoms=COLOUR_MAP)
    return sm.image_to_model(colour_grid(h, w, red_cells), opts)


def model_a():
    """1x3 strip, centre red."""
    return grid_model(1, 3, [(0, 1)])


def model_b():
    """3x3, centre red."""
    return grid_model(3, 3, [(1, 1)])


def model_c():
    """4x4, 2x2 red centre."""
    return grid_model(4, 4, [(r, c) for r in (1, 2) for c in (1, 2)])


def model_d():
    """5x5, 3x3 red centre; the middle cell sees no blue."""
    return grid_model(5, 5, [(r, c) for r in (1, 2, 3) for c in (1, 2, 3)])


def fig2_model():
    """Four points, x1' -> x1 and x2' -> x2, atom p only on x1'."""
    return sm.Model(
        ["x1", "x2", "x1p", "x2p"],
        [("x1p", "x1"), ("x2p", "x2")],
        {"x1p": {"p"}},
    )


def two_component_model():
    """Eleven cells in two strips with orthogonal adjacency: a 1x4 strip
    yellow-green-blue-red and a 1x7 strip mirrored around its red cell.
    Same-colour cells across the components are bisimilar."""
    colours = {
        "l0": "yellow", "l1": "green", "l2": "blue", "l3": "red",
        "r0": "yellow", "r1": "green", "r2": "blue", "r3": "red",
        "r4": "blue", "r5": "green", "r6": "yellow",
    }
    chain = [("l0", "l1"), ("l1", "l2"), ("l2", "l3")] + [
        (f"r{i}", f"r{i+1}") for i in range(6)
    ]
    edges = []
    for u, v in chain:
        edges.append((u, v))
        edges.append((v, u))
    return sm.Model(list(colours), edges, {p: {c} for p, c in colours.items()})


def line_model():
    """a - b - c with symmetric edges; a red, b blue, c green."""
    return sm.Model(
        ["a", "b", "c"],
        [("a", "b"), ("b", "a"), ("b", "c"), ("c", "b")],
        {"a": {"red"}, "b": {"blue"}, "c": {"green"}},
    )


def expected_minimal_abc():
    """Two-state target: each state sees both."""
    return sm.Model(
        ["t1", "t2"],
        [("t1", "t1"), ("t1", "t2"), ("t2", "t1"), ("t2", "t2")],
        {"t1": {"blue"}, "t2": {"red"}},
        {"blue", "red"},
    )


def expected_minimal_d():
    """Three-state target: centre red / red ring / blue border."""
    edges = []
    fwd = {"t3": ["t3", "t4"], "t4": ["t3", "t4", "t5"], "t5": ["t4", "t5"]}
    for u, vs in fwd.items():
        edges.extend((u, v) for v in vs)
    return sm.Model(
        ["t3", "t4", "t5"], edges,
        {"t3": {"red"}, "t4": {"red"}, "t5": {"blue"}},
        {"blue", "red"},
    )


def models_isomorphic(m1: sm.Model, m2: sm.Model) -> bool:
    """Brute-force atom-and-edge-preserving bijection search (small n)."""
    if m1.n != m2.n or m1.atoms != m2.atoms:
        return False
    ids1, ids2 = m1.point_ids, m2.point_ids
    e1 = {(m1.index_of(u), m1.index_of(v)) for u, v in m1.edge_list()}
    e2 = {(m2.index_of(u), m2.index_of(v)) for u, v in m2.edge_list()}
    if len(e1) != len(e2):
        return False
    for perm in itertools.permutations(range(m2.n)):
        if all(m1.atoms_of(ids1[i]) == m2.atoms_of(ids2[perm[i]]) for i in range(m1.n)):
            if {(perm[u], perm[v]) for u, v in e1} == e2:
                return True
    return False


def eta_isomorphic(m1: sm.Model, m2: sm.Model) -> bool:
    """Bijection preserving atoms and one-step closures (closure-model
    isomorphism: self-loop edges are invisible, closures already contain
    the point)."""
    if m1.n != m2.n or m1.atoms != m2.atoms:
        return False
    ids1, ids2 = m1.point_ids, m2.point_ids
    fwd1 = [frozenset(m1.forward_closure(p).indices().tolist()) for p in ids1]
    fwd2 = [frozenset(m2.forward_closure(p).indices().tolist()) for p in ids2]
    for perm in itertools.permutations(range(m2.n)):
        if all(m1.atoms_of(ids1[i]) == m2.atoms_of(ids2[perm[i]]) for i in range(m1.n)):
            if all(
                frozenset(perm[j] for j in fwd1[i]) == fwd2[perm[i]]
                for i in range(m1.n)
            ):
                return True
    return False


def rand_model(rng: random.Random, max_n: int, atom_pool=("p", "q"), edge_p=0.3) -> sm.Model:
    n = rng.randint(1, max_n)
    ids = [f"n{i}" for i in range(n)]
    edges = [
        (u, v)
        for u in ids
        for v in ids
        if rng.random() < edge_p
    ]
    valuation = {}
    for p in ids:
        props = {a for a in atom_pool if rng.random() < 0.5}
        if props:
            valuation[p] = props
    return sm.Model(ids, edges, valuation, atom_pool)


def rand_space(rng: random.Random, max_n: int, atom_pool=("p", "q")) -> sm.FiniteClosureSpace:
    n = rng.randint(1, max_n)
    ids = [f"n{i}" for i in range(n)]
    scl = {}
    for i, p in enumerate(ids):
        members = {p} | {q for q in ids if rng.random() < 0.35}
        scl[p] = members
    valuation = {}
    for p in ids:
        props = {a for a in atom_pool if rng.random() < 0.5}
        if props:
            valuation[p] = props
    return sm.FiniteClosureSpace(ids, scl, valuation, atom_pool)


def doubled_space(s: sm.FiniteClosureSpace) -> sm.FiniteClosureSpace:
    """Two disjoint copies of a space: every point gains a twin it is
    equivalent to, so block structure is never all-singletons."""
    ids = [f"{k}:{p}" for k in (0, 1) for p in s.point_ids]
    scl = {
        f"{k}:{p}": {f"{k}:{q}" for q in s.singleton_closure(p)}
        for k in (0, 1)
        for p in s.point_ids
    }
    valuation = {
        f"{k}:{p}": set(s.atoms_of(p))
        for k in (0, 1)
        for p in s.point_ids
        if s.atoms_of(p)
    }
    return sm.FiniteClosureSpace(ids, scl, valuation, s.atoms)


def rand_point_set(rng: random.Random, m: sm.Model) -> sm.PointSet:
    return m.point_set([p for p in m.point_ids if rng.random() < 0.5])


def rand_formula(rng: random.Random, atoms, depth: int) -> sm.Formula:
    """Random formula over the given atoms, derived operators included."""
    atoms = list(atoms)
    if depth <= 0 or rng.random() < 0.2:
        roll = rng.random()
        if roll < 0.7 and atoms:
            return sm.Atom(rng.choice(atoms))
        if roll < 0.85:
            return sm.TRUE
        return sm.FALSE
    sub = lambda: rand_formula(rng, atoms, depth - 1)
    kind = rng.randrange(8)
    if kind == 0:
        return sm.Not(sub())
    if kind == 1:
        return sm.Or(sub(), sub())
    if kind == 2:
        return sm.And(tuple(sub() for _ in range(rng.randint(2, 3))))
    if kind == 3:
        return sm.ReachFwd(sub(), sub())
    if kind == 4:
        return sm.ReachBwd(sub(), sub())
    if kind == 5:
        return sm.Near(sub())
    if kind == 6:
        return sm.Surrounded(sub(), sub())
    return sm.Propagate(sub(), sub())


def rand_iml_formula(rng: random.Random, atoms, depth: int) -> sm.Formula:
    """Random formula in the near-only modal fragment."""
    atoms = list(atoms)
    if depth <= 0 or rng.random() < 0.25:
        if atoms and rng.random() < 0.8:
            return sm.Atom(rng.choice(atoms))
        return sm.TRUE if rng.random() < 0.5 else sm.FALSE
    kind = rng.randrange(4)
    sub = lambda: rand_iml_formula(rng, atoms, depth - 1)
    if kind == 0:
        return sm.Not(sub())
    if kind == 1:
        return sm.And(tuple(sub() for _ in range(rng.randint(2, 3))))
    if kind == 2:
        return sm.Or(sub(), sub())
    return sm.Near(sub())


@pytest.fixture
def rng():
    return random.Random(0xC10)
