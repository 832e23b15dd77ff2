"""Set-level spatial bisimulation: definitions as literal checkers.

Three equivalent formulations live here: the back-and-forth relation
checker (five transfer conditions over one-step closures), the
equivalence-class formulation, and the observation-triple formulation
where each point is summarized as ``(atoms, forward closure, backward
closure)``.  :func:`largest_bisimulation` computes the coarsest
bisimulation by the naive split-until-stable loop over Python sets;
it deliberately shares no code with the optimized refinement engine in
:mod:`spatialmin.minimize`, which it exists to cross-check.
"""

from __future__ import annotations

from typing import Hashable, Iterable, Sequence

import numpy as np

from .model import Model, PointSet, SizeLimitError

__all__ = [
    "Partition", "PointRelation",
    "is_bisimulation_bf", "is_bisimulation_eqrel",
    "largest_bisimulation", "eta_signature", "is_eta_bisimulation",
    "LARGEST_BISIM_MAX_POINTS",
]

LARGEST_BISIM_MAX_POINTS = 2000


class Partition:
    """A partition of ``{0, ..., n-1}`` as a dense block-id assignment.

    Block ids are canonicalized to first-occurrence order, so two
    partitions are equal exactly when they have the same kernel.
    """

    __slots__ = ("assignment", "blocks")

    def __init__(self, assignment: Sequence[int]):
        arr = np.asarray(assignment, dtype=np.int64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("assignment must be a non-empty 1-d sequence")
        if arr.size <= 64:
            relabel: dict[int, int] = {}
            canon = np.empty(arr.size, dtype=np.int32)
            for i, b in enumerate(arr.tolist()):
                canon[i] = relabel.setdefault(b, len(relabel))
            self.assignment = canon
            self.blocks = len(relabel)
        else:
            uniq, first, inv = np.unique(arr, return_index=True, return_inverse=True)
            order = np.empty(uniq.size, dtype=np.int64)
            order[np.argsort(first, kind="stable")] = np.arange(uniq.size)
            self.assignment = order[inv].astype(np.int32)
            self.blocks = int(uniq.size)

    @classmethod
    def _precanonical(cls, assignment: np.ndarray, blocks: int) -> "Partition":
        # trusted fast path for assignments already in first-occurrence order
        self = cls.__new__(cls)
        self.assignment = assignment
        self.blocks = blocks
        return self

    @classmethod
    def from_blocks(cls, n: int, blocks: Iterable[Iterable[int]]) -> "Partition":
        arr = np.full(n, -1, dtype=np.int64)
        for b, members in enumerate(blocks):
            for i in members:
                if arr[i] != -1:
                    raise ValueError(f"index {i} appears in two blocks")
                arr[i] = b
        if (arr == -1).any():
            raise ValueError("blocks do not cover the carrier")
        return cls(arr)

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(np.arange(n))

    @classmethod
    def one_block(cls, n: int) -> "Partition":
        return cls(np.zeros(n, dtype=np.int64))

    def of(self, index: int) -> int:
        return int(self.assignment[index])

    def members(self, block: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == block)

    def as_blocks(self) -> tuple:
        out: list[list[int]] = [[] for _ in range(self.blocks)]
        for i, b in enumerate(self.assignment.tolist()):
            out[b].append(i)
        return tuple(tuple(b) for b in out)

    def block_ids(self, m: Model, block: int) -> tuple:
        return tuple(m.id_of(i) for i in self.members(block))

    def same_block(self, i: int, j: int) -> bool:
        return bool(self.assignment[i] == self.assignment[j])

    def refines(self, other: "Partition") -> bool:
        """Every block of self lies inside one block of `other`."""
        if self.assignment.size != other.assignment.size:
            raise ValueError("partitions over different carriers")
        rep: dict[int, int] = {}
        for b_self, b_other in zip(self.assignment.tolist(), other.assignment.tolist()):
            if rep.setdefault(b_self, b_other) != b_other:
                return False
        return True

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return bool(np.array_equal(self.assignment, other.assignment))

    __hash__ = None

    def __len__(self) -> int:
        return self.blocks

    def __repr__(self) -> str:
        return f"Partition(blocks={self.blocks}, n={self.assignment.size})"


class PointRelation:
    """A binary relation over one model's points, as a set of index pairs."""

    __slots__ = ("model", "pairs")

    def __init__(self, model: Model, pairs: Iterable[tuple[int, int]]):
        self.model = model
        self.pairs = frozenset((int(a), int(b)) for a, b in pairs)
        for a, b in self.pairs:
            if not (0 <= a < model.n and 0 <= b < model.n):
                raise ValueError(f"pair ({a}, {b}) outside the carrier")

    @classmethod
    def from_pairs(cls, model: Model, id_pairs: Iterable[tuple]) -> "PointRelation":
        return cls(model, ((model.index_of(x), model.index_of(y)) for x, y in id_pairs))

    @classmethod
    def from_partition(cls, model: Model, p: Partition) -> "PointRelation":
        if p.assignment.size != model.n:
            raise ValueError("partition carrier does not match the model")
        pairs = []
        for block in range(p.blocks):
            members = p.members(block).tolist()
            pairs.extend((a, b) for a in members for b in members)
        return cls(model, pairs)

    def contains(self, x: Hashable, y: Hashable) -> bool:
        return (self.model.index_of(x), self.model.index_of(y)) in self.pairs

    def reflexive_symmetric_closure(self) -> "PointRelation":
        pairs = set(self.pairs)
        pairs.update((b, a) for a, b in self.pairs)
        pairs.update((i, i) for i in range(self.model.n))
        return PointRelation(self.model, pairs)

    def is_reflexive(self) -> bool:
        return all((i, i) in self.pairs for i in range(self.model.n))

    def is_symmetric(self) -> bool:
        return all((b, a) in self.pairs for a, b in self.pairs)

    def is_transitive(self) -> bool:
        by_left: dict[int, set[int]] = {}
        for a, b in self.pairs:
            by_left.setdefault(a, set()).add(b)
        return all(
            (a, c) in self.pairs
            for a, b in self.pairs
            for c in by_left.get(b, ())
        )

    def is_equivalence(self) -> bool:
        return self.is_reflexive() and self.is_symmetric() and self.is_transitive()

    def __len__(self) -> int:
        return len(self.pairs)


def _fwd_sets(m: Model) -> list[frozenset]:
    return [
        frozenset(m._fwd_indices(i).tolist()) | {i} for i in range(m.n)
    ]


def _bwd_sets(m: Model) -> list[frozenset]:
    return [
        frozenset(m._bwd_indices(i).tolist()) | {i} for i in range(m.n)
    ]


def is_bisimulation_bf(
    m: Model,
    b: PointRelation,
    conditions: Iterable[int] = (1, 2, 3, 4, 5),
) -> bool:
    """Literal check of the five back-and-forth conditions.

    `conditions` is test support: dropping items 4-5 yields the weaker
    forward-only notion that the backward conditions exist to rule out.
    """
    if b.model is not m:
        raise ValueError("relation belongs to a different model")
    if not b.pairs:
        raise ValueError("bisimulation relations must be non-empty")
    conds = frozenset(conditions)
    fwd = _fwd_sets(m)
    bwd = _bwd_sets(m)
    pairs = b.pairs

    def transfer(close1: frozenset, close2: frozenset, flipped: bool) -> bool:
        # every member of close1 must have a partner in close2
        for a in close1:
            if flipped:
                if not any((c, a) in pairs for c in close2):
                    return False
            else:
                if not any((a, c) in pairs for c in close2):
                    return False
        return True

    for x1, x2 in pairs:
        if 1 in conds and m._valuation[x1] != m._valuation[x2]:
            return False
        if 2 in conds and not transfer(fwd[x1], fwd[x2], flipped=False):
            return False
        if 3 in conds and not transfer(fwd[x2], fwd[x1], flipped=True):
            return False
        if 4 in conds and not transfer(bwd[x1], bwd[x2], flipped=False):
            return False
        if 5 in conds and not transfer(bwd[x2], bwd[x1], flipped=True):
            return False
    return True


def is_bisimulation_eqrel(m: Model, p: Partition) -> bool:
    """Equivalence-class formulation: for every pair of related points and
    every equivalence class C, the forward closures meet C together or
    not at all, and likewise backward; atoms agree pairwise."""
    if p.assignment.size != m.n:
        raise ValueError("partition carrier does not match the model")
    fwd = _fwd_sets(m)
    bwd = _bwd_sets(m)
    classes = [frozenset(p.members(b).tolist()) for b in range(p.blocks)]
    for block in range(p.blocks):
        members = p.members(block).tolist()
        x1 = members[0]
        for x2 in members[1:]:
            if m._valuation[x1] != m._valuation[x2]:
                return False
            for cls in classes:
                if bool(fwd[x1] & cls) != bool(fwd[x2] & cls):
                    return False
                if bool(bwd[x1] & cls) != bool(bwd[x2] & cls):
                    return False
    return True


def eta_signature(m: Model, x: Hashable) -> tuple[frozenset, PointSet, PointSet]:
    """One-step observation of a point: its atom set, forward closure and
    backward closure."""
    return (m.atoms_of(x), m.forward_closure(x), m.backward_closure(x))


def is_eta_bisimulation(m: Model, p: Partition) -> bool:
    """Observation-triple formulation: related points must have equal
    first components and their second/third components must meet the same
    blocks."""
    if p.assignment.size != m.n:
        raise ValueError("partition carrier does not match the model")
    assign = p.assignment
    fwd = _fwd_sets(m)
    bwd = _bwd_sets(m)
    # the triple (eta x)_1, (eta x)_2, (eta x)_3, with components 2 and 3
    # reduced to the blocks they intersect
    triples = [
        (
            m._valuation[i],
            frozenset(int(assign[z]) for z in fwd[i]),
            frozenset(int(assign[z]) for z in bwd[i]),
        )
        for i in range(m.n)
    ]
    for block in range(p.blocks):
        members = p.members(block).tolist()
        key0 = triples[members[0]]
        for x in members[1:]:
            if triples[x] != key0:
                return False
    return True


def largest_bisimulation(m: Model) -> Partition:
    """Coarsest bisimulation partition by the naive greatest-fixpoint loop.

    Starts from the atom partition and re-sorts every block by its full
    (forward blocks, backward blocks) signature each round until stable.
    Oracle-grade: plain Python sets, no shortcuts.
    """
    if m.n > LARGEST_BISIM_MAX_POINTS:
        raise SizeLimitError(
            f"largest_bisimulation supports at most {LARGEST_BISIM_MAX_POINTS} points,"
            f" model has {m.n}"
        )
    fwd = _fwd_sets(m)
    bwd = _bwd_sets(m)

    seen: dict[frozenset, int] = {}
    assign = [seen.setdefault(m._valuation[i], len(seen)) for i in range(m.n)]

    while True:
        groups: dict[tuple, int] = {}
        new = []
        for i in range(m.n):
            sig = (
                assign[i],
                frozenset(assign[z] for z in fwd[i]),
                frozenset(assign[z] for z in bwd[i]),
            )
            new.append(groups.setdefault(sig, len(groups)))
        if len(groups) == len(set(assign)):
            return Partition(assign)
        assign = new
