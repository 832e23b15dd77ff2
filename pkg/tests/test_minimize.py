"""Refinement traces, quotient construction, characteristic and
distinguishing formulas."""

import random

import numpy as np
import pytest

import spatialmin as sm

from conftest import (
    eta_isomorphic, expected_minimal_abc, expected_minimal_d, fig2_model,
    model_a, model_b, model_c, model_d, models_isomorphic, rand_formula,
    rand_model,
)


def test_small_models_refine_to_two_blocks():
    for m in (model_a(), model_b(), model_c()):
        assert sm.partition_refine(m).final.blocks == 2


def test_md_refines_to_three_blocks():
    trace = sm.partition_refine(model_d())
    assert trace.final.blocks == 3


def test_disjoint_union_of_all_four():
    m = sm.disjoint_union([model_a(), model_b(), model_c(), model_d()])
    assert sm.partition_refine(m).final.blocks == 5


def test_trace_shape():
    trace = sm.partition_refine(model_d())
    assert trace.rounds[0].blocks == 2  # the atom partition
    for a, b in zip(trace.rounds, trace.rounds[1:]):
        assert b.refines(a)
    assert trace.rounds[-1] == trace.rounds[-2]
    assert len(trace.rounds) <= model_d().n


def test_trace_on_uniform_model_is_single_round():
    m = sm.Model(["a", "b"], [("a", "b")])
    trace = sm.partition_refine(m)
    assert [p.blocks for p in trace.rounds] == [1]


def test_refinement_monotone_block_counts():
    rng = random.Random(40)
    for _ in range(100):
        m = rand_model(rng, 9)
        counts = [p.blocks for p in sm.partition_refine(m).rounds]
        assert counts == sorted(counts)
        assert len(counts) <= m.n


def test_quotient_of_mc_matches_two_state_target():
    m = model_c()
    q = sm.quotient(m, sm.partition_refine(m).final)
    assert models_isomorphic(q.model, expected_minimal_abc())


def test_quotient_of_md_matches_three_state_target():
    m = model_d()
    q = sm.quotient(m, sm.partition_refine(m).final)
    assert models_isomorphic(q.model, expected_minimal_d())


def test_quotient_by_singletons_is_isomorphic_copy():
    # isomorphic as closure models: the quotient materializes the self
    # edges that closures imply, so raw edge sets may gain loops
    rng = random.Random(41)
    for _ in range(30):
        m = rand_model(rng, 5)
        q = sm.quotient(m, sm.Partition.singletons(m.n))
        assert eta_isomorphic(q.model, m)


def test_quotient_rejects_non_bisimulation():
    m = model_d()
    seen, assign = {}, []
    for p in m.point_ids:
        assign.append(seen.setdefault(m.atoms_of(p), len(seen)))
    with pytest.raises(ValueError):
        sm.quotient(m, sm.Partition(assign))


def test_quotient_projection_is_observation_homomorphism():
    rng = random.Random(42)
    for _ in range(60):
        m = rand_model(rng, 8)
        part = sm.partition_refine(m).final
        q = sm.quotient(m, part)
        for x in m.point_ids:
            bx = q.projection[x]
            assert q.model.atoms_of(bx) == m.atoms_of(x)
            down_fwd = {q.projection[p] for p in m.forward_closure(x).ids()}
            down_bwd = {q.projection[p] for p in m.backward_closure(x).ids()}
            assert down_fwd == set(q.model.forward_closure(bx).ids())
            assert down_bwd == set(q.model.backward_closure(bx).ids())


def test_quotient_is_minimal():
    rng = random.Random(43)
    for _ in range(50):
        m = rand_model(rng, 8)
        q = sm.quotient(m, sm.partition_refine(m).final)
        again = sm.partition_refine(q.model).final
        assert again.blocks == q.model.n


def test_sat_transports_through_projection():
    rng = random.Random(44)
    for _ in range(25):
        m = rand_model(rng, 7)
        q = sm.quotient(m, sm.partition_refine(m).final)
        for _ in range(4):
            f = rand_formula(rng, ["p", "q"], 3)
            up = sm.sat(m, f).sat
            down = sm.sat(q.model, f).sat
            for x in m.point_ids:
                assert (x in up) == (q.projection[x] in down)


def test_characteristic_formulas_pin_every_block():
    rng = random.Random(45)
    for _ in range(40):
        m = rand_model(rng, 8)
        trace = sm.partition_refine(m)
        last = len(trace.rounds) - 1
        for b in range(trace.final.blocks):
            chi = sm.characteristic_formula(trace, m, b, last)
            assert sm.is_sublogic_minus(chi)
            got = sm.sat(m, chi).sat
            expected = m.point_set([m.point_ids[i] for i in trace.final.members(b)])
            assert got == expected


def test_characteristic_formulas_pin_intermediate_rounds():
    m = model_d()
    trace = sm.partition_refine(m)
    for r in range(len(trace.rounds)):
        for b in range(trace.rounds[r].blocks):
            chi = sm.characteristic_formula(trace, m, b, r)
            got = sm.sat(m, chi).sat
            expected = m.point_set([m.point_ids[i] for i in trace.rounds[r].members(b)])
            assert got == expected


def test_characteristic_round0_empty_atoms_is_true():
    m = sm.Model(["u", "v"], [("u", "v")])
    trace = sm.partition_refine(m)
    chi = sm.characteristic_formula(trace, m, 0, 0)
    assert chi == sm.TRUE


def test_characteristic_formula_index_errors():
    m = model_a()
    trace = sm.partition_refine(m)
    with pytest.raises(IndexError):
        sm.characteristic_formula(trace, m, 0, 99)
    with pytest.raises(IndexError):
        sm.characteristic_formula(trace, m, 99, 0)


def test_five_block_union_characteristics_and_hand_formulas():
    m = sm.disjoint_union(
        [model_a(), model_b(), model_c(), model_d()], tags=["a", "b", "c", "d"]
    )
    trace = sm.partition_refine(m)
    assert trace.final.blocks == 5
    q = sm.quotient(m, trace.final)
    mm = q.model

    # machine-generated characteristics isolate each of the five blocks
    last = len(trace.rounds) - 1
    for b in range(5):
        chi = sm.characteristic_formula(trace, m, b, last)
        assert len(sm.sat(m, chi).sat) == len(trace.final.members(b))

    # the five hand-written separations, evaluated on the minimal model
    phi1 = "blue & near(red)"
    phi2 = "red & near(blue)"
    phi3 = "red & !near(blue)"
    singles = [
        f"{phi1} & !reachFwd({phi3}, true)",
        f"{phi2} & !near({phi3})",
        f"{phi1} & reachFwd({phi3}, true)",
        f"{phi2} & near({phi3})",
        phi3,
    ]
    for text in singles:
        assert len(sm.sat(mm, sm.parse(text)).sat) == 1


def test_distinguishing_formula_fig2():
    m = fig2_model()
    f = sm.distinguishing_formula(m, "x1", "x2")
    assert f is not None and sm.is_sublogic_minus(f)
    s = sm.sat(m, f).sat
    assert "x1" in s and "x2" not in s
    # the known hand witness also separates
    w = sm.sat(m, sm.parse("reachBwd(p, false)")).sat
    assert "x1" in w and "x2" not in w


def test_distinguishing_formula_same_point_is_none():
    m = fig2_model()
    assert sm.distinguishing_formula(m, "x1", "x1") is None


def test_distinguishing_formula_random_cross_validation():
    rng = random.Random(46)
    for _ in range(200):
        m = rand_model(rng, 7)
        part = sm.largest_bisimulation(m)
        xs = list(m.point_ids)
        x = rng.choice(xs)
        y = rng.choice(xs)
        f = sm.distinguishing_formula(m, x, y)
        if f is None:
            assert part.same_block(m.index_of(x), m.index_of(y))
        else:
            assert not part.same_block(m.index_of(x), m.index_of(y))
            assert sm.is_sublogic_minus(f)
            s = sm.sat(m, f).sat
            assert x in s and y not in s


def test_refinement_deterministic_block_numbering():
    m = model_d()
    a = sm.partition_refine(m)
    b = sm.partition_refine(m)
    for pa, pb in zip(a.rounds, b.rounds):
        assert np.array_equal(pa.assignment, pb.assignment)


def test_distinguishing_formula_on_deep_chain():
    # a long directed path separates late; the block formulas must build
    # and verify at depth without blowing the stack
    n = 120
    ids = [f"v{i}" for i in range(n)]
    m = sm.Model(ids, list(zip(ids, ids[1:])), {ids[0]: {"p"}}, ["p"])
    f = sm.distinguishing_formula(m, "v60", "v61")
    assert f is not None and sm.is_sublogic_minus(f)
    s = sm.sat(m, f).sat
    assert "v60" in s and "v61" not in s


def test_refinement_engines_agree():
    from spatialmin.minimize import _refine_rounds_dense, _refine_rounds_sets

    rng = random.Random(47)
    for _ in range(200):
        m = rand_model(rng, 10)
        dense = _refine_rounds_dense(m)
        sets = _refine_rounds_sets(m)
        assert len(dense) == len(sets)
        for pd, ps in zip(dense, sets):
            assert np.array_equal(pd.assignment, ps.assignment)
