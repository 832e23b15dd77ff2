"""Partition refinement, quotient models, and distinguishing formulas.

The refinement loop iterates ``q' = (F q) . eta`` starting from the
constant map: each round re-observes every point as ``(atom set, blocks
met by its forward closure, blocks met by its backward closure)`` under
the current block assignment, and stops when the kernel no longer
changes.  Rounds are vectorized over padded neighbour matrices so that
pixel-scale carriers refine in seconds; block ids are canonicalized to
first-occurrence order after every round, which makes traces, quotients
and generated formulas reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable

import numpy as np

from .bisim import Partition
from .formulas import (
    FALSE, And, Atom, Formula, Not, ReachBwd, ReachFwd, conjunction,
)
from .model import Model

__all__ = [
    "RefinementTrace", "QuotientModel", "partition_refine", "quotient",
    "characteristic_formula", "distinguishing_formula",
]

_MIX = np.uint64(0x9E3779B97F4A7C15)
_SHIFT = np.uint64(29)
_PAD = np.int32(np.iinfo(np.int32).max)


def _canonical_inverse(h: np.ndarray, key: np.ndarray) -> np.ndarray | None:
    """Group rows of `key` by the 64-bit digest `h`, verifying exactness.

    Returns the block assignment in first-occurrence order, or None when
    two distinct rows collided on the digest (caller falls back to exact
    row grouping).
    """
    _, first, inv = np.unique(h, return_index=True, return_inverse=True)
    if not (key == key[first[inv]]).all():
        return None
    order = np.empty(first.size, dtype=np.int32)
    order[np.argsort(first, kind="stable")] = np.arange(first.size, dtype=np.int32)
    return order[inv]


def _exact_inverse(key: np.ndarray) -> np.ndarray:
    keyc = np.ascontiguousarray(key)
    view = keyc.view([("", keyc.dtype)] * keyc.shape[1]).ravel()
    _, first, inv = np.unique(view, return_index=True, return_inverse=True)
    order = np.empty(first.size, dtype=np.int32)
    order[np.argsort(first, kind="stable")] = np.arange(first.size, dtype=np.int32)
    return order[inv]


def _group_rows(key: np.ndarray) -> np.ndarray:
    # reinterpret int32 rows as half as many int64 columns (pad if odd)
    if key.shape[1] % 2:
        padded = np.empty((key.shape[0], key.shape[1] + 1), dtype=np.int32)
        padded[:, :-1] = key
        padded[:, -1] = 0
        key = padded
    else:
        key = np.ascontiguousarray(key)
    wide = key.view(np.uint64)
    h = np.zeros(key.shape[0], dtype=np.uint64)
    for j in range(wide.shape[1]):
        h = (h ^ wide[:, j]) * _MIX
        h ^= h >> _SHIFT
    out = _canonical_inverse(h, wide)
    if out is None:
        out = _exact_inverse(wide)
    return out


def _sorted_block_sets(q: np.ndarray, nbrs: np.ndarray) -> np.ndarray:
    """Per point, the set of blocks met by its padded neighbourhood, as a
    sorted fixed-width row padded with a sentinel."""
    g = q[nbrs]
    g.sort(axis=1)
    if g.shape[1] > 1:
        tail = g[:, 1:]
        tail[tail == g[:, :-1]] = _PAD
        g.sort(axis=1)
    return g


@dataclass
class RefinementTrace:
    """Refinement history: round 0 is the atom partition, the last round
    repeats the first stable kernel (absent only when the atom partition
    is already a single stable block)."""

    model: Model
    rounds: list[Partition]
    _chi_cache: dict = field(default_factory=dict, repr=False)

    @property
    def final(self) -> Partition:
        return self.rounds[-1]

    def separation_round(self, i: int, j: int) -> int | None:
        """First round index at which carrier indices i and j sit in
        different blocks, or None if they never separate."""
        for r, p in enumerate(self.rounds):
            if not p.same_block(i, j):
                return r
        return None


_SET_ENGINE_MAX = 64


def _refine_rounds_sets(m: Model) -> list[Partition]:
    """Plain-dict refinement engine for small carriers, where ndarray call
    overhead dwarfs the actual work.  Groups by the same observation as
    the dense engine and labels blocks in the same first-occurrence
    order, so both engines produce identical traces."""
    n = m.n
    atom_keys = [m.atom_key(i) for i in range(n)]
    fwd = [m._fwd_indices(i).tolist() for i in range(n)]
    bwd = [m._bwd_indices(i).tolist() for i in range(n)]
    q = [0] * n
    rounds: list[Partition] = []
    while True:
        groups: dict = {}
        q_next = []
        for i in range(n):
            sig = (
                atom_keys[i],
                frozenset(q[z] for z in fwd[i]) | {q[i]},
                frozenset(q[z] for z in bwd[i]) | {q[i]},
            )
            q_next.append(groups.setdefault(sig, len(groups)))
        rounds.append(
            Partition._precanonical(np.array(q_next, dtype=np.int32), len(groups))
        )
        if q_next == q:
            break
        q = q_next
    return rounds


def _refine_rounds_dense(m: Model) -> list[Partition]:
    """Vectorized refinement engine over padded neighbour matrices."""
    atom_keys = np.array([m.atom_key(i) for i in range(m.n)], dtype=np.int32)
    fwd_nbrs = m.neighbour_matrix(forward=True)
    symmetric = m.is_symmetric()
    bwd_nbrs = None if symmetric else m.neighbour_matrix(forward=False)

    def step(q: np.ndarray) -> np.ndarray:
        fwd = _sorted_block_sets(q, fwd_nbrs)
        parts = [atom_keys[:, None], fwd]
        if bwd_nbrs is not None:
            parts.append(_sorted_block_sets(q, bwd_nbrs))
        key = np.concatenate(parts, axis=1)
        return _group_rows(key)

    q = np.zeros(m.n, dtype=np.int32)
    rounds: list[Partition] = []
    while True:
        q_next = step(q)
        rounds.append(Partition._precanonical(q_next, int(q_next.max()) + 1))
        # canonical ids make kernel equality literal array equality
        if np.array_equal(q_next, q):
            break
        q = q_next
    return rounds


def partition_refine(m: Model) -> RefinementTrace:
    """Iterate the one-step observation refinement until the kernel is
    stable; the final partition is the coarsest bisimulation."""
    if m.n <= _SET_ENGINE_MAX:
        rounds = _refine_rounds_sets(m)
    else:
        rounds = _refine_rounds_dense(m)
    return RefinementTrace(m, rounds)


@dataclass
class QuotientModel:
    """The minimal model together with the projection map onto it."""

    model: Model
    projection: dict
    partition: Partition


def _is_observation_stable(m: Model, p: Partition) -> bool:
    """Vectorized equivalent of the observation-triple bisimulation check:
    within every block, members must agree on atoms and on the blocks met
    by their forward and backward closures.  Scales to pixel carriers,
    unlike the oracle-grade checker it mirrors."""
    atom_keys = np.array([m.atom_key(i) for i in range(m.n)], dtype=np.int32)
    q = p.assignment.astype(np.int32)
    parts = [atom_keys[:, None], _sorted_block_sets(q, m.neighbour_matrix(True))]
    if not m.is_symmetric():
        parts.append(_sorted_block_sets(q, m.neighbour_matrix(False)))
    key = np.concatenate(parts, axis=1)
    _, first = np.unique(q, return_index=True)
    return bool((key == key[first[q]]).all())


def quotient(m: Model, p: Partition) -> QuotientModel:
    """Quotient a model by a bisimulation partition.

    Block C gets the atom set of its members and an edge to every block
    its members' forward closures meet, including C itself; the forward
    closure of C in the quotient is then exactly the blockwise image of
    the forward closure downstairs, making the projection a
    homomorphism of one-step observations.
    """
    if p.assignment.size != m.n:
        raise ValueError("partition carrier does not match the model")
    if not _is_observation_stable(m, p):
        raise ValueError("partition is not a bisimulation; cannot quotient")
    assign = p.assignment
    block_ids = [f"b{b}" for b in range(p.blocks)]
    valuation = {}
    edges = []
    for b in range(p.blocks):
        rep = int(p.members(b)[0])
        rep_id = m.id_of(rep)
        atoms = m.atoms_of(rep_id)
        if atoms:
            valuation[block_ids[b]] = set(atoms)
        met = np.unique(assign[m.forward_closure(rep_id).mask])
        edges.extend((block_ids[b], block_ids[int(d)]) for d in met)
    qm = Model(block_ids, edges, valuation, m.atoms)
    projection = {pid: block_ids[int(assign[i])] for i, pid in enumerate(m.point_ids)}
    return QuotientModel(qm, projection, p)


def characteristic_formula(
    trace: RefinementTrace, m: Model, block: int, round: int
) -> Formula:
    """A formula holding exactly on the members of one block of one
    refinement round.

    Round 0 pins the block's atom set; round k+1 conjoins the parent
    block's formula with, for every round-k block D, the (possibly
    negated) ability to see D in one forward and one backward step.  All
    one-step observations take ``false`` as their second argument, so the
    result stays inside the one-step sublogic.  Subformulas are shared
    across blocks and rounds.
    """
    if trace.model is not m:
        raise ValueError("trace was computed on a different model")
    if not (0 <= round < len(trace.rounds)):
        raise IndexError(f"round {round} outside the trace (0..{len(trace.rounds) - 1})")
    part = trace.rounds[round]
    if not (0 <= block < part.blocks):
        raise IndexError(f"block {block} does not exist at round {round}")

    cache = trace._chi_cache
    atom_order = sorted(m.atoms, key=str)
    for r in range(round + 1):
        part_r = trace.rounds[r]
        if all((r, b) in cache for b in range(part_r.blocks)):
            continue
        if r == 0:
            for b in range(part_r.blocks):
                if (r, b) in cache:
                    continue
                have = m.atoms_of(m.id_of(int(part_r.members(b)[0])))
                cache[(r, b)] = conjunction(
                    Atom(a) if a in have else Not(Atom(a)) for a in atom_order
                )
        else:
            prev = trace.rounds[r - 1]
            fwd_yes = [ReachFwd(cache[(r - 1, d)], FALSE) for d in range(prev.blocks)]
            bwd_yes = [ReachBwd(cache[(r - 1, d)], FALSE) for d in range(prev.blocks)]
            fwd_no = [Not(f) for f in fwd_yes]
            bwd_no = [Not(f) for f in bwd_yes]
            for b in range(part_r.blocks):
                if (r, b) in cache:
                    continue
                rep = int(part_r.members(b)[0])
                rep_id = m.id_of(rep)
                fwd_met = set(np.unique(prev.assignment[m.forward_closure(rep_id).mask]).tolist())
                bwd_met = set(np.unique(prev.assignment[m.backward_closure(rep_id).mask]).tolist())
                parts: list[Formula] = [cache[(r - 1, prev.of(rep))]]
                parts += [fwd_yes[d] if d in fwd_met else fwd_no[d] for d in range(prev.blocks)]
                parts += [bwd_yes[d] if d in bwd_met else bwd_no[d] for d in range(prev.blocks)]
                cache[(r, b)] = And(tuple(parts))
    return cache[(round, block)]


def distinguishing_formula(m: Model, x: Hashable, y: Hashable) -> Formula | None:
    """A one-step-sublogic formula holding at `x` but not at `y`, or None
    when the two points are bisimilar."""
    xi, yi = m.index_of(x), m.index_of(y)
    trace = partition_refine(m)
    r = trace.separation_round(xi, yi)
    if r is None:
        return None
    return characteristic_formula(trace, m, trace.rounds[r].of(xi), r)
