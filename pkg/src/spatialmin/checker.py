"""Satisfaction of spatial formulas on quasi-discrete closure models.

:func:`sat` evaluates formulas bottom-up over point sets; reachability
operators become monotone fixpoints over the edge relation.
:func:`sat_oracle` evaluates the reachability clauses literally, by
enumerating step sequences, and exists to cross-check :func:`sat` on
small carriers.  The two share no reachability code.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Hashable, Iterable

import numpy as np

from .formulas import (
    And, Atom, FalseF, Formula, Not, Or, ReachBwd, ReachFwd, TrueF, desugar,
)
from .model import Model, PointSet, SizeLimitError

__all__ = [
    "SatResult", "UnknownAtomWarning", "sat", "sat_oracle",
    "reach_set", "logically_equivalent", "ORACLE_MAX_POINTS",
]

ORACLE_MAX_POINTS = 12


class UnknownAtomWarning(UserWarning):
    """A queried atom is not declared on the model; it evaluates to the
    empty set (a colour may simply be absent from an image)."""


@dataclass
class SatResult:
    """A formula together with the set of points satisfying it."""

    formula: Formula
    sat: PointSet

    def holds_at(self, point: Hashable) -> bool:
        return point in self.sat


def _atom_mask(m: Model, name: str) -> np.ndarray:
    try:
        return m.atom_set(name).mask
    except KeyError:
        warnings.warn(
            f"atom {name!r} is not declared on the model; treating as empty",
            UnknownAtomWarning,
            stacklevel=3,
        )
        return np.zeros(m.n, dtype=bool)


def reach_set(m: Model, goal: PointSet, via: PointSet, forward: bool = True) -> PointSet:
    """Points from which `goal` is reachable along a path whose
    intermediate points (strictly between start and arrival) all lie in
    `via`; arrival at distance 0 or 1 needs no intermediate points.

    Computed as the least fixpoint of ``Z -> goal | (via & pre(Z))``
    followed by one more pre-step, where ``pre(Z)`` collects the points
    whose one-step closure meets ``Z``.  With `forward` false the edge
    relation is traversed in reverse (the "being reached" direction).
    """
    if goal.model is not m or via.model is not m:
        raise ValueError("point sets belong to a different model")
    if forward:
        src, dst = m.esrc, m.edst
    else:
        src, dst = m.edst, m.esrc

    def pre_extra(mask: np.ndarray) -> np.ndarray:
        out = np.zeros(m.n, dtype=bool)
        if src.size:
            out[src[mask[dst]]] = True
        return out

    inner = goal.mask.copy()
    frontier = inner
    while True:
        new = pre_extra(frontier) & via.mask & ~inner
        if not new.any():
            break
        inner |= new
        frontier = new
    return PointSet(m, inner | pre_extra(inner))


def sat(m: Model, f: Formula) -> SatResult:
    """Evaluate a formula on every point of the model at once.

    Derived operators are desugared first.  Atoms missing from the model
    raise :class:`UnknownAtomWarning` and evaluate to the empty set.
    Shared subformulas (DAG nodes) are evaluated once.
    """
    core = desugar(f)
    memo: dict[int, np.ndarray] = {}

    def ev(node: Formula) -> np.ndarray:
        key = id(node)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if isinstance(node, Atom):
            out = _atom_mask(m, node.name)
        elif isinstance(node, TrueF):
            out = np.ones(m.n, dtype=bool)
        elif isinstance(node, FalseF):
            out = np.zeros(m.n, dtype=bool)
        elif isinstance(node, Not):
            out = ~ev(node.child)
        elif isinstance(node, Or):
            out = ev(node.left) | ev(node.right)
        elif isinstance(node, And):
            out = np.ones(m.n, dtype=bool)
            for c in node.children:
                out = out & ev(c)
        elif isinstance(node, ReachFwd):
            out = reach_set(m, PointSet(m, ev(node.target)),
                            PointSet(m, ev(node.via)), forward=True).mask
        elif isinstance(node, ReachBwd):
            out = reach_set(m, PointSet(m, ev(node.source)),
                            PointSet(m, ev(node.via)), forward=False).mask
        else:
            raise TypeError(f"not a core formula node: {node!r}")
        memo[key] = out
        return out

    return SatResult(f, PointSet(m, ev(core)))


# -- literal oracle ---------------------------------------------------------

def _oracle_reach(n: int, steps: list[list[int]], goal: frozenset, via: frozenset) -> frozenset:
    """Literal sequence enumeration for a reachability clause.

    For every start point, search for a step sequence z0, ..., zk (all
    distinct, k <= number of points) with zk in `goal` and every strictly
    intermediate z j in `via`.  Distinctness is complete: any witness with
    a repeated point has a shorter witness obtained by splicing the loop
    out, and stuttering adds nothing since one-step closures contain the
    point itself.
    """
    result = set()
    for start in range(n):
        if start in goal:
            result.add(start)
            continue
        on_path = {start}

        def search(cur: int) -> bool:
            for nxt in steps[cur]:
                if nxt in on_path:
                    continue
                if nxt in goal:
                    return True
                if nxt in via:
                    on_path.add(nxt)
                    if search(nxt):
                        return True
                    on_path.discard(nxt)
            return False

        if search(start):
            result.add(start)
    return frozenset(result)


def sat_oracle(m: Model, f: Formula) -> SatResult:
    """Brute-force satisfaction: the reachability clauses are evaluated by
    enumerating step sequences directly.  Limited to small carriers."""
    if m.n > ORACLE_MAX_POINTS:
        raise SizeLimitError(
            f"oracle supports at most {ORACLE_MAX_POINTS} points, model has {m.n}"
        )
    core = desugar(f)
    fwd_steps = [sorted(m.forward_closure(p).indices().tolist()) for p in m.point_ids]
    bwd_steps = [sorted(m.backward_closure(p).indices().tolist()) for p in m.point_ids]
    full = frozenset(range(m.n))
    memo: dict[int, frozenset] = {}

    def ev(node: Formula) -> frozenset:
        key = id(node)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if isinstance(node, Atom):
            out = frozenset(np.flatnonzero(_atom_mask(m, node.name)).tolist())
        elif isinstance(node, TrueF):
            out = full
        elif isinstance(node, FalseF):
            out = frozenset()
        elif isinstance(node, Not):
            out = full - ev(node.child)
        elif isinstance(node, Or):
            out = ev(node.left) | ev(node.right)
        elif isinstance(node, And):
            out = full
            for c in node.children:
                out = out & ev(c)
        elif isinstance(node, ReachFwd):
            out = _oracle_reach(m.n, fwd_steps, ev(node.target), ev(node.via))
        elif isinstance(node, ReachBwd):
            out = _oracle_reach(m.n, bwd_steps, ev(node.source), ev(node.via))
        else:
            raise TypeError(f"not a core formula node: {node!r}")
        memo[key] = out
        return out

    mask = np.zeros(m.n, dtype=bool)
    for i in ev(core):
        mask[i] = True
    return SatResult(f, PointSet(m, mask))


def logically_equivalent(
    m: Model, x: Hashable, y: Hashable, corpus: Iterable[Formula]
) -> bool:
    """Whether two points agree on every formula of a finite corpus."""
    xi, yi = m.index_of(x), m.index_of(y)
    for f in corpus:
        s = sat(m, f).sat.mask
        if bool(s[xi]) != bool(s[yi]):
            return False
    return True
