"""Quasi-discrete closure models over finite point sets.

A model is a finite set of points, a directed edge relation R, and a
valuation assigning a finite set of atomic propositions to each point.
The closure operator it induces is ``C(A) = A | {x : exists a in A with
a R x}``; interior is the complement-closure-complement dual.  Edges are
stored exactly as given: no reflexive or symmetric completion happens
here (ingesters decide that), since ``A <= C(A)`` makes reflexivity
irrelevant and symmetry is a modelling choice.

Models are immutable after construction and all operations are pure, so
they can be shared freely between threads.
"""

from __future__ import annotations

from typing import Hashable, Iterable, Sequence

import numpy as np

__all__ = ["Model", "PointSet", "SizeLimitError"]


class SizeLimitError(ValueError):
    """An operation was invoked on a carrier above its supported size."""


class PointSet:
    """A subset of one model's carrier, stored as a bit vector.

    Supports the usual set algebra (``|``, ``&``, ``-``, ``~``);
    complement is always taken relative to the owning model's carrier.
    """

    __slots__ = ("model", "mask")

    def __init__(self, model: "Model", mask: np.ndarray):
        self.model = model
        self.mask = mask

    def _check(self, other: "PointSet") -> None:
        if self.model is not other.model:
            raise ValueError("point sets belong to different models")

    def __or__(self, other: "PointSet") -> "PointSet":
        self._check(other)
        return PointSet(self.model, self.mask | other.mask)

    def __and__(self, other: "PointSet") -> "PointSet":
        self._check(other)
        return PointSet(self.model, self.mask & other.mask)

    def __sub__(self, other: "PointSet") -> "PointSet":
        self._check(other)
        return PointSet(self.model, self.mask & ~other.mask)

    def __invert__(self) -> "PointSet":
        return PointSet(self.model, ~self.mask)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return self.model is other.model and bool(np.array_equal(self.mask, other.mask))

    def __ne__(self, other: object) -> bool:
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    __hash__ = None  # mutable ndarray inside; use ids() when a key is needed

    def __len__(self) -> int:
        return int(self.mask.sum())

    def __contains__(self, point: Hashable) -> bool:
        return bool(self.mask[self.model.index_of(point)])

    def __iter__(self):
        return iter(self.ids())

    def ids(self) -> tuple:
        """Member ids in carrier (index) order."""
        return tuple(self.model.id_of(i) for i in np.flatnonzero(self.mask))

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def is_empty(self) -> bool:
        return not self.mask.any()

    def issubset(self, other: "PointSet") -> bool:
        self._check(other)
        return bool(np.all(~self.mask | other.mask))

    def __repr__(self) -> str:
        ids = self.ids()
        shown = ", ".join(repr(i) for i in ids[:8])
        if len(ids) > 8:
            shown += ", ..."
        return f"PointSet({{{shown}}})"


class Model:
    """A quasi-discrete closure model ``((X, C_R), V)``.

    Parameters
    ----------
    points:
        Iterable of distinct point ids (any hashable; strings recommended).
        Must be non-empty.
    edges:
        Iterable of ordered pairs ``(u, v)`` meaning ``u R v``.  Stored as a
        set: duplicates collapse, order is normalized.
    valuation:
        Mapping point id -> iterable of atom names.  Points may be omitted
        (empty atom set).
    atoms:
        The atomic-proposition universe.  Defaults to the union of the
        valuation's atom sets; if given, it must cover them.
    """

    def __init__(
        self,
        points: Iterable[Hashable],
        edges: Iterable[tuple] = (),
        valuation: dict | None = None,
        atoms: Iterable[str] | None = None,
    ):
        ids = list(points)
        if not ids:
            raise ValueError("a closure model needs a non-empty set of points")
        index: dict = {}
        for i, p in enumerate(ids):
            if p in index:
                raise ValueError(f"duplicate point id: {p!r}")
            index[p] = i
        self._ids = tuple(ids)
        self._index = index
        self.n = len(ids)

        valuation = valuation or {}
        val: list[frozenset] = [frozenset()] * self.n
        for p, props in valuation.items():
            if p not in index:
                raise ValueError(f"valuation mentions unknown point: {p!r}")
            val[index[p]] = frozenset(props)
        self._valuation = tuple(val)

        used = frozenset().union(*self._valuation) if self._valuation else frozenset()
        if atoms is None:
            self.atoms = used
        else:
            self.atoms = frozenset(atoms)
            extra = used - self.atoms
            if extra:
                raise ValueError(f"valuation uses atoms outside the declared set: {sorted(extra)}")

        pairs = set()
        for u, v in edges:
            if u not in index or v not in index:
                raise ValueError(f"edge endpoint not among points: ({u!r}, {v!r})")
            pairs.add((index[u], index[v]))
        if pairs:
            arr = np.array(sorted(pairs), dtype=np.int32)
            esrc, edst = arr[:, 0].copy(), arr[:, 1].copy()
        else:
            esrc = np.empty(0, dtype=np.int32)
            edst = np.empty(0, dtype=np.int32)
        self._finish(esrc, edst)

    @classmethod
    def from_arrays(
        cls,
        points: Sequence[Hashable],
        esrc: np.ndarray,
        edst: np.ndarray,
        valuation_sets: Sequence[frozenset],
        atoms: Iterable[str],
    ) -> "Model":
        """Bulk constructor over index arrays; used by ingesters that
        already work in carrier indices (for instance the image loader).
        Edges are deduplicated and sorted here."""
        self = cls.__new__(cls)
        ids = list(points)
        if not ids:
            raise ValueError("a closure model needs a non-empty set of points")
        self._ids = tuple(ids)
        self._index = {p: i for i, p in enumerate(ids)}
        if len(self._index) != len(ids):
            raise ValueError("duplicate point ids")
        self.n = len(ids)
        if len(valuation_sets) != self.n:
            raise ValueError("valuation_sets must cover every point")
        self._valuation = tuple(
            v if isinstance(v, frozenset) else frozenset(v) for v in valuation_sets
        )
        self.atoms = frozenset(atoms)
        used = frozenset().union(*self._valuation) if self._valuation else frozenset()
        if used - self.atoms:
            raise ValueError("valuation uses atoms outside the declared set")
        esrc = np.asarray(esrc, dtype=np.int64)
        edst = np.asarray(edst, dtype=np.int64)
        if esrc.size and not (
            (esrc >= 0).all() and (esrc < self.n).all()
            and (edst >= 0).all() and (edst < self.n).all()
        ):
            raise ValueError("edge index outside the carrier")
        packed = np.unique(esrc * self.n + edst)
        self._finish(
            (packed // self.n).astype(np.int32), (packed % self.n).astype(np.int32)
        )
        return self

    def _finish(self, esrc: np.ndarray, edst: np.ndarray) -> None:
        """Index the (already sorted, deduplicated) edge arrays."""
        self.esrc = esrc
        self.edst = edst
        self._fwd_indptr = np.searchsorted(self.esrc, np.arange(self.n + 1))
        order = np.lexsort((self.esrc, self.edst))
        self._bwd_src = self.esrc[order]
        bdst = self.edst[order]
        self._bwd_indptr = np.searchsorted(bdst, np.arange(self.n + 1))

        # atom-set interning: dense key per distinct atom set, in first-occurrence order
        seen: dict = {}
        keys = np.empty(self.n, dtype=np.int32)
        for i, a in enumerate(self._valuation):
            keys[i] = seen.setdefault(a, len(seen))
        self._atom_keys = keys
        self._atom_masks: dict = {}

    # -- basic accessors ------------------------------------------------

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

    def edge_list(self) -> list[tuple]:
        return [(self._ids[u], self._ids[v]) for u, v in zip(self.esrc, self.edst)]

    def atom_key(self, index: int) -> int:
        """Dense id of the atom set at a carrier index (interned)."""
        return int(self._atom_keys[index])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Model):
            return NotImplemented
        return (
            self._ids == other._ids
            and self.atoms == other.atoms
            and self._valuation == other._valuation
            and np.array_equal(self.esrc, other.esrc)
            and np.array_equal(self.edst, other.edst)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"Model(n={self.n}, edges={len(self.esrc)}, atoms={sorted(map(str, self.atoms))})"

    # -- point sets -----------------------------------------------------

    def empty_set(self) -> PointSet:
        return PointSet(self, np.zeros(self.n, dtype=bool))

    def full_set(self) -> PointSet:
        return PointSet(self, np.ones(self.n, dtype=bool))

    def point_set(self, points: Iterable[Hashable]) -> PointSet:
        mask = np.zeros(self.n, dtype=bool)
        for p in points:
            mask[self.index_of(p)] = True
        return PointSet(self, mask)

    def _wrap(self, mask: np.ndarray) -> PointSet:
        return PointSet(self, mask)

    def atom_set(self, atom: str) -> PointSet:
        """All points whose valuation contains `atom` (V^-1 as a set)."""
        if atom not in self.atoms:
            raise KeyError(f"unknown atom: {atom!r}")
        cached = self._atom_masks.get(atom)
        if cached is None:
            cached = np.array([atom in v for v in self._valuation], dtype=bool)
            self._atom_masks[atom] = cached
        return PointSet(self, cached.copy())

    # -- closure algebra -------------------------------------------------

    def closure(self, a: PointSet) -> PointSet:
        """``C_R(A) = A | {x : exists u in A with u R x}``."""
        if a.model is not self:
            raise ValueError("point set belongs to a different model")
        out = a.mask.copy()
        if self.esrc.size:
            hit = a.mask[self.esrc]
            out[self.edst[hit]] = True
        return PointSet(self, out)

    def interior(self, a: PointSet) -> PointSet:
        """Dual of closure: complement of the closure of the complement."""
        return ~self.closure(~a)

    def _fwd_indices(self, i: int) -> np.ndarray:
        return self.edst[self._fwd_indptr[i]:self._fwd_indptr[i + 1]]

    def _bwd_indices(self, i: int) -> np.ndarray:
        return self._bwd_src[self._bwd_indptr[i]:self._bwd_indptr[i + 1]]

    def forward_closure(self, point: Hashable) -> PointSet:
        """``C_R({x})``: the point itself plus its R-successors."""
        i = self.index_of(point)
        mask = np.zeros(self.n, dtype=bool)
        mask[i] = True
        mask[self._fwd_indices(i)] = True
        return PointSet(self, mask)

    def backward_closure(self, point: Hashable) -> PointSet:
        """``C_{R^-1}({x})``: the point itself plus its R-predecessors."""
        i = self.index_of(point)
        mask = np.zeros(self.n, dtype=bool)
        mask[i] = True
        mask[self._bwd_indices(i)] = True
        return PointSet(self, mask)

    def is_path_prefix(self, seq: Sequence[Hashable]) -> bool:
        """Whether `seq` is a valid finite prefix of a quasi-discrete path.

        Each step must land inside the forward closure of its predecessor;
        stuttering is allowed because the forward closure contains the
        point itself.
        """
        if not seq:
            raise ValueError("a path prefix must contain at least one point")
        idxs = [self.index_of(p) for p in seq]
        for cur, nxt in zip(idxs, idxs[1:]):
            if nxt == cur:
                continue
            succ = self._fwd_indices(cur)
            pos = np.searchsorted(succ, nxt)
            if pos >= succ.size or succ[pos] != nxt:
                return False
        return True

    # -- derived views ----------------------------------------------------

    def reversed(self) -> "Model":
        """The same carrier and valuation with every edge flipped."""
        return Model(
            self._ids,
            [(self._ids[v], self._ids[u]) for u, v in zip(self.esrc, self.edst)],
            {p: set(v) for p, v in zip(self._ids, self._valuation) if v},
            self.atoms,
        )

    def is_symmetric(self) -> bool:
        """Whether the stored edge relation equals its own inverse."""
        if not self.esrc.size:
            return True
        fwd = np.stack([self.esrc, self.edst], axis=1)
        rev = np.stack([self.edst, self.esrc], axis=1)
        rev = rev[np.lexsort((rev[:, 1], rev[:, 0]))]
        return bool(np.array_equal(fwd, rev))

    def max_out_degree(self) -> int:
        return int(np.diff(self._fwd_indptr).max()) if self.n else 0

    def max_in_degree(self) -> int:
        return int(np.diff(self._bwd_indptr).max()) if self.n else 0

    def neighbour_matrix(self, forward: bool = True) -> np.ndarray:
        """Padded successor (or predecessor) index matrix.

        Row ``i`` holds the one-step forward (backward) closure of point
        ``i``; shorter rows are padded with ``i`` itself, which is harmless
        under set semantics since ``x in C({x})`` always.
        """
        if forward:
            indptr, targets = self._fwd_indptr, self.edst
        else:
            indptr, targets = self._bwd_indptr, self._bwd_src
        deg = np.diff(indptr)
        width = int(deg.max()) + 1 if self.n else 1
        out = np.repeat(np.arange(self.n, dtype=np.int32)[:, None], width, axis=1)
        cols = np.arange(width - 1)
        take = cols[None, :] < deg[:, None]
        rows, cs = np.nonzero(take)
        out[rows, cs + 1] = targets[indptr[rows] + cs]
        return out
