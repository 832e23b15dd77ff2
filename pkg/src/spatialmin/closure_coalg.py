"""Finite closure spaces with an explicit closure operator.

A finite closure space is stored by its singleton closures: on a finite
carrier the union axiom determines ``C(A)`` as the union of the
closures of A's singletons, so the representation is lossless — and it
also means every representable space is quasi-discrete.  The machinery
below still works at the level of the general definitions (subset
quantification for the bisimulation check, subset-level observations
for the powerset-functor refinement), exercising them on the finite
instances where they collapse.

Equivalence notions computed here:

* :func:`iml_equivalence` — logical equivalence for the modal fragment
  with atoms, negation, finite conjunction and a ``near`` operator with
  the closure semantics.  On a finite carrier it is reached by
  refinement on the observation "which blocks can close over me".
* :func:`closure_functor_equivalence` — behavioural equivalence of the
  subset-observation coalgebra ``x -> (atoms, {A : x in C(A)})``,
  refined with blockwise images of the observed subsets.
* :func:`is_gcm_bisimulation` — the literal neighbourhood-transfer
  bisimulation condition, checked by exhaustive subset search.

Subsets are Python int bitmasks throughout; carriers are desk-scale.
"""

from __future__ import annotations

import warnings
from typing import Hashable, Iterable

from .bisim import Partition
from .checker import UnknownAtomWarning
from .formulas import (
    And, Atom, FalseF, Formula, Near, Not, Or, TrueF,
    conjunction, is_iml_formula,
)
from .model import Model, SizeLimitError

__all__ = [
    "FiniteClosureSpace",
    "is_gcm_bisimulation", "iml_equivalence", "closure_functor_equivalence",
    "quotient_space", "iml_sat", "iml_distinguishing_formula",
    "GCM_MAX_POINTS", "CLOSURE_FUNCTOR_MAX_POINTS",
]

GCM_MAX_POINTS = 14
CLOSURE_FUNCTOR_MAX_POINTS = 10


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class FiniteClosureSpace:
    """A finite closure space plus valuation, via singleton closures.

    `singleton_closure` maps each point id to the ids in the closure of
    its singleton; each point must belong to its own closure.
    """

    def __init__(
        self,
        points: Iterable[Hashable],
        singleton_closure: dict,
        valuation: dict | None = None,
        atoms: Iterable[str] | None = None,
    ):
        ids = list(points)
        if not ids:
            raise ValueError("a closure space needs a non-empty set of points")
        index: dict = {}
        for i, p in enumerate(ids):
            if p in index:
                raise ValueError(f"duplicate point id: {p!r}")
            index[p] = i
        self._ids = tuple(ids)
        self._index = index
        self.n = len(ids)

        scl = [0] * self.n
        for p, members in singleton_closure.items():
            if p not in index:
                raise ValueError(f"singleton closure given for unknown point: {p!r}")
            mask = 0
            for q in members:
                if q not in index:
                    raise ValueError(f"closure of {p!r} mentions unknown point: {q!r}")
                mask |= 1 << index[q]
            scl[index[p]] = mask
        for i in range(self.n):
            if not (scl[i] >> i) & 1:
                raise ValueError(
                    f"point {self._ids[i]!r} must belong to its own singleton closure"
                )
        self._scl = tuple(scl)

        valuation = valuation or {}
        val: list[frozenset] = [frozenset()] * self.n
        for p, props in valuation.items():
            if p not in index:
                raise ValueError(f"valuation mentions unknown point: {p!r}")
            val[index[p]] = frozenset(props)
        self._valuation = tuple(val)
        used = frozenset().union(*val) if val else frozenset()
        self.atoms = frozenset(atoms) if atoms is not None else used
        if used - self.atoms:
            raise ValueError("valuation uses atoms outside the declared set")

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_model(cls, m: Model) -> "FiniteClosureSpace":
        """View a quasi-discrete model as a closure space: the closure of a
        singleton is its one-step forward closure."""
        scl = {p: m.forward_closure(p).ids() for p in m.point_ids}
        valuation = {p: m.atoms_of(p) for p in m.point_ids if m.atoms_of(p)}
        return cls(m.point_ids, scl, valuation, m.atoms)

    def to_model(self) -> Model:
        """The quasi-discrete model generating this space."""
        edges = []
        for i in range(self.n):
            for j in _bits(self._scl[i]):
                if j != i:
                    edges.append((self._ids[i], self._ids[j]))
        valuation = {p: v for p, v in zip(self._ids, self._valuation) if v}
        return Model(self._ids, edges, valuation, self.atoms)

    # -- basic accessors ----------------------------------------------------

    @property
    def point_ids(self) -> tuple:
        return self._ids

    def index_of(self, point: Hashable) -> int:
        try:
            return self._index[point]
        except KeyError:
            raise KeyError(f"unknown point: {point!r}") from None

    def id_of(self, index: int) -> Hashable:
        return self._ids[index]

    def atoms_of(self, point: Hashable) -> frozenset:
        return self._valuation[self.index_of(point)]

    def singleton_closure(self, point: Hashable) -> frozenset:
        return self._to_ids(self._scl[self.index_of(point)])

    def _to_mask(self, points: Iterable[Hashable]) -> int:
        mask = 0
        for p in points:
            mask |= 1 << self.index_of(p)
        return mask

    def _to_ids(self, mask: int) -> frozenset:
        return frozenset(self._ids[i] for i in _bits(mask))

    def _closure_mask(self, mask: int) -> int:
        out = 0
        for i in _bits(mask):
            out |= self._scl[i]
        return out

    def _interior_mask(self, mask: int) -> int:
        full = (1 << self.n) - 1
        return full & ~self._closure_mask(full & ~mask)

    def closure(self, points: Iterable[Hashable]) -> frozenset:
        return self._to_ids(self._closure_mask(self._to_mask(points)))

    def interior(self, points: Iterable[Hashable]) -> frozenset:
        """Complement-closure-complement dual."""
        return self._to_ids(self._interior_mask(self._to_mask(points)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteClosureSpace):
            return NotImplemented
        return (
            self._ids == other._ids
            and self._scl == other._scl
            and self._valuation == other._valuation
            and self.atoms == other.atoms
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"FiniteClosureSpace(n={self.n}, atoms={sorted(map(str, self.atoms))})"


def is_gcm_bisimulation(s: FiniteClosureSpace, p: Partition) -> bool:
    """Literal neighbourhood-transfer bisimulation check.

    For every related pair (x1, x2) and every subset X1 with x1 in the
    interior of X1, some subset X2 must put x2 in its interior while all
    its members have related partners in X1.  Candidate X2 sets are
    enumerated exhaustively in increasing size, with interiors memoized;
    the search exits on the first witness.
    """
    if s.n > GCM_MAX_POINTS:
        raise SizeLimitError(
            f"subset quantification supports at most {GCM_MAX_POINTS} points, space has {s.n}"
        )
    if p.assignment.size != s.n:
        raise ValueError("partition carrier does not match the space")
    n = s.n
    full = (1 << n) - 1
    interiors = [s._interior_mask(a) for a in range(full + 1)]
    by_size = sorted(range(full + 1), key=lambda a: (bin(a).count("1"), a))

    assign = p.assignment
    partner_mask = [0] * n
    for z in range(n):
        for w in range(n):
            if assign[z] == assign[w]:
                partner_mask[z] |= 1 << w

    pairs = [
        (x1, x2)
        for x1 in range(n)
        for x2 in range(n)
        if assign[x1] == assign[x2]
    ]
    for x1, x2 in pairs:
        if s._valuation[x1] != s._valuation[x2]:
            return False
        for x1_set in range(full + 1):
            if not (interiors[x1_set] >> x1) & 1:
                continue
            found = False
            for x2_set in by_size:
                if not (interiors[x2_set] >> x2) & 1:
                    continue
                if all((partner_mask[z] & x1_set) for z in _bits(x2_set)):
                    found = True
                    break
            if not found:
                return False
    return True


def _refine(s: FiniteClosureSpace, observe) -> list[Partition]:
    """Shared refinement loop: split blocks by ``(atoms, observe(x, q))``
    until stable, starting from the trivial one-block map."""
    n = s.n
    assign = [0] * n
    rounds: list[Partition] = []
    while True:
        groups: dict = {}
        new = []
        for x in range(n):
            sig = (s._valuation[x], observe(x, assign))
            new.append(groups.setdefault(sig, len(groups)))
        rounds.append(Partition(new))
        if len(groups) == len(set(assign)):
            return rounds
        assign = new


def _iml_rounds(s: FiniteClosureSpace) -> list[Partition]:
    # reverse singleton membership: which points' closures cover x
    rev = [0] * s.n
    for z in range(s.n):
        for x in _bits(s._scl[z]):
            rev[x] |= 1 << z

    def observe(x: int, assign: list) -> frozenset:
        return frozenset(assign[z] for z in _bits(rev[x]))

    return _refine(s, observe)


def iml_equivalence(s: FiniteClosureSpace) -> Partition:
    """Logical equivalence for the near-based modal fragment.

    The observation of a point is the set of blocks that can close over
    it (the blocks whose members' singleton closures contain it); on a
    finite carrier, refining on that observation computes logical
    equivalence for the fragment, infinitary conjunction included, since
    block-characteristic formulas are finite conjunctions.
    """
    return _iml_rounds(s)[-1]


def closure_functor_equivalence(s: FiniteClosureSpace) -> Partition:
    """Behavioural equivalence of the subset-observation coalgebra.

    A point observes every subset it is closed over; a refinement step
    replaces each observed subset by its blockwise image and splits
    blocks whose members disagree on the resulting family.
    """
    if s.n > CLOSURE_FUNCTOR_MAX_POINTS:
        raise SizeLimitError(
            f"subset sweep supports at most {CLOSURE_FUNCTOR_MAX_POINTS} points,"
            f" space has {s.n}"
        )
    n = s.n
    full = (1 << n) - 1
    closed_over: list[list[int]] = [[] for _ in range(n)]
    for a in range(full + 1):
        ca = s._closure_mask(a)
        for x in _bits(ca):
            closed_over[x].append(a)

    def observe(x: int, assign: list) -> frozenset:
        fam = set()
        for a in closed_over[x]:
            fam.add(frozenset(assign[i] for i in _bits(a)))
        return frozenset(fam)

    return _refine(s, observe)[-1]


def _is_stable(s: FiniteClosureSpace, p: Partition) -> bool:
    """Whether one more blockwise-observation refinement step would not
    split `p` (equivalently, per fixed partition, whether the subset-level
    observations agree within every block)."""
    rev = [0] * s.n
    for z in range(s.n):
        for x in _bits(s._scl[z]):
            rev[x] |= 1 << z
    assign = p.assignment
    for b in range(p.blocks):
        members = p.members(b).tolist()
        first = members[0]
        sig0 = (s._valuation[first], frozenset(int(assign[z]) for z in _bits(rev[first])))
        for x in members[1:]:
            sig = (s._valuation[x], frozenset(int(assign[z]) for z in _bits(rev[x])))
            if sig != sig0:
                return False
    return True


def quotient_space(s: FiniteClosureSpace, p: Partition) -> FiniteClosureSpace:
    """Quotient a closure space by a stable partition.

    The closure of a quotient singleton is the blockwise image of the
    closure of the block's member set, so satisfaction of the modal
    fragment transfers along the projection.
    """
    if p.assignment.size != s.n:
        raise ValueError("partition carrier does not match the space")
    if not _is_stable(s, p):
        raise ValueError("partition is not stable; quotient would be ill-defined")
    assign = p.assignment
    block_ids = [f"b{b}" for b in range(p.blocks)]
    block_mask = [0] * p.blocks
    for i in range(s.n):
        block_mask[int(assign[i])] |= 1 << i
    scl = {}
    valuation = {}
    for b in range(p.blocks):
        closed = s._closure_mask(block_mask[b])
        scl[block_ids[b]] = {block_ids[int(assign[i])] for i in _bits(closed)}
        rep = int(p.members(b)[0])
        if s._valuation[rep]:
            valuation[block_ids[b]] = set(s._valuation[rep])
    return FiniteClosureSpace(block_ids, scl, valuation, s.atoms)


def iml_sat(s: FiniteClosureSpace, f: Formula) -> frozenset:
    """Points satisfying a formula of the near-based modal fragment;
    ``near`` is evaluated as closure of the satisfaction set."""
    if not is_iml_formula(f):
        raise ValueError("formula uses reachability operators; not in the modal fragment")
    full = (1 << s.n) - 1
    memo: dict[int, int] = {}

    def ev(node: Formula) -> int:
        key = id(node)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if isinstance(node, Atom):
            if node.name not in s.atoms:
                warnings.warn(
                    f"atom {node.name!r} is not declared on the space; treating as empty",
                    UnknownAtomWarning,
                    stacklevel=3,
                )
                out = 0
            else:
                out = 0
                for i in range(s.n):
                    if node.name in s._valuation[i]:
                        out |= 1 << i
        elif isinstance(node, TrueF):
            out = full
        elif isinstance(node, FalseF):
            out = 0
        elif isinstance(node, Not):
            out = full & ~ev(node.child)
        elif isinstance(node, Or):
            out = ev(node.left) | ev(node.right)
        elif isinstance(node, And):
            out = full
            for c in node.children:
                out &= ev(c)
        elif isinstance(node, Near):
            out = s._closure_mask(ev(node.child))
        else:
            raise TypeError(f"not a formula node: {node!r}")
        memo[key] = out
        return out

    return s._to_ids(ev(f))


def iml_distinguishing_formula(
    s: FiniteClosureSpace, x: Hashable, y: Hashable
) -> Formula | None:
    """A modal-fragment formula holding at `x` but not `y`, or None when
    the refinement never separates them.

    Built like the reachability-based distinguishing formulas, with
    ``near`` probes instead: a block's formula at round k+1 conjoins its
    parent's formula with, for every round-k block D, ``near``
    of D's formula or its negation."""
    xi, yi = s.index_of(x), s.index_of(y)
    rounds = _iml_rounds(s)
    sep = None
    for r, part in enumerate(rounds):
        if not part.same_block(xi, yi):
            sep = r
            break
    if sep is None:
        return None

    rev = [0] * s.n
    for z in range(s.n):
        for i in _bits(s._scl[z]):
            rev[i] |= 1 << z

    cache: dict = {}
    atom_order = sorted(s.atoms, key=str)
    for r in range(sep + 1):
        part_r = rounds[r]
        if r == 0:
            for b in range(part_r.blocks):
                have = s._valuation[int(part_r.members(b)[0])]
                cache[(r, b)] = conjunction(
                    Atom(a) if a in have else Not(Atom(a)) for a in atom_order
                )
        else:
            prev = rounds[r - 1]
            probe_yes = [Near(cache[(r - 1, d)]) for d in range(prev.blocks)]
            probe_no = [Not(f) for f in probe_yes]
            for b in range(part_r.blocks):
                rep = int(part_r.members(b)[0])
                observed = {int(prev.assignment[z]) for z in _bits(rev[rep])}
                parts: list[Formula] = [cache[(r - 1, prev.of(rep))]]
                parts += [
                    probe_yes[d] if d in observed else probe_no[d]
                    for d in range(prev.blocks)
                ]
                cache[(r, b)] = And(tuple(parts))
    return cache[(sep, rounds[sep].of(xi))]
