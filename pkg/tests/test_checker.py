"""Fixpoint satisfaction against figure examples, the literal oracle,
and the closure identity for the near operator."""

import random

import pytest

import spatialmin as sm

from conftest import (
    fig2_model, line_model, model_a, model_b, model_c, model_d,
    rand_formula, rand_model,
)


def test_middle_cell_reaches_red_but_is_not_near_blue():
    m = model_d()
    centre = "2_2"
    reach = sm.sat(m, sm.parse("reachFwd(blue, red)"))
    assert centre in reach.sat
    near_blue = sm.sat(m, sm.parse("near(blue)"))
    assert centre not in near_blue.sat


def test_every_red_point_is_near_blue_in_small_models():
    for m in (model_a(), model_b(), model_c()):
        near_blue = sm.sat(m, sm.parse("near(blue)")).sat
        for p in sm.sat(m, sm.parse("red")).sat.ids():
            assert p in near_blue


def test_false_is_empty():
    m = model_a()
    assert sm.sat(m, sm.FALSE).sat.is_empty()


def test_surrounded_on_line_model():
    m = line_model()
    result = sm.sat(m, sm.parse("surrounded(red, blue)"))
    assert sorted(result.sat.ids()) == ["a"]


def test_oracle_remark_witness():
    m = fig2_model()
    r = sm.sat_oracle(m, sm.parse("reachBwd(p, false)"))
    assert "x1" in r.sat and "x2" not in r.sat


def test_oracle_single_point_reach():
    m = sm.Model(["only"])
    r = sm.sat_oracle(m, sm.parse("reachFwd(true, true)"))
    assert sorted(r.sat.ids()) == ["only"]


def test_oracle_size_limit():
    m = sm.Model([f"n{i}" for i in range(13)])
    with pytest.raises(sm.SizeLimitError):
        sm.sat_oracle(m, sm.TRUE)


def test_sat_matches_oracle_on_random_pairs():
    rng = random.Random(2024)
    for _ in range(150):
        m = rand_model(rng, 7)
        f = rand_formula(rng, ["p", "q"], 4)
        assert sm.sat(m, f).sat == sm.sat_oracle(m, f).sat


def test_near_is_closure_of_sat_set():
    rng = random.Random(31)
    for _ in range(100):
        m = rand_model(rng, 8)
        f = rand_formula(rng, ["p", "q"], 3)
        lhs = sm.sat(m, sm.Near(f)).sat
        assert lhs == m.closure(sm.sat(m, f).sat)


def test_reach_false_collapses_to_one_step():
    rng = random.Random(32)
    for _ in range(100):
        m = rand_model(rng, 7)
        f = rand_formula(rng, ["p", "q"], 3)
        target = sm.sat(m, f).sat
        got = sm.sat(m, sm.ReachFwd(f, sm.FALSE)).sat
        expected = m.point_set(
            [x for x in m.point_ids if not (m.forward_closure(x) & target).is_empty()]
        )
        assert got == expected


def test_reach_fixpoint_is_monotone_and_bounded():
    rng = random.Random(33)
    for _ in range(50):
        m = rand_model(rng, 8)
        s1 = sm.sat(m, rand_formula(rng, ["p", "q"], 2)).sat
        s2 = sm.sat(m, rand_formula(rng, ["p", "q"], 2)).sat
        # naive iterate of Z -> S1 | (S2 & pre(Z))
        z = m.empty_set()
        iterations = 0
        while True:
            pre = m.point_set(
                [x for x in m.point_ids if not (m.forward_closure(x) & z).is_empty()]
            )
            nxt = s1 | (s2 & pre)
            iterations += 1
            assert z.issubset(nxt)
            if nxt == z:
                break
            z = nxt
        assert iterations <= m.n + 1
        pre_b = m.point_set(
            [x for x in m.point_ids if not (m.forward_closure(x) & z).is_empty()]
        )
        assert sm.sat(m, sm.ReachFwd(sm.TRUE, sm.TRUE)).sat == m.full_set()
        assert (s1 | pre_b) == sm.reach_set(m, s1, s2, forward=True)


def test_bisimilar_points_agree_on_random_formulas():
    rng = random.Random(55)
    for _ in range(20):
        m = rand_model(rng, 7)
        part = sm.largest_bisimulation(m)
        for _ in range(10):
            f = rand_formula(rng, ["p", "q"], 3)
            s = sm.sat(m, f).sat
            for b in range(part.blocks):
                members = [m.point_ids[i] for i in part.members(b)]
                hits = {p in s for p in members}
                assert len(hits) == 1


def test_unknown_atom_warns_and_is_empty():
    m = model_a()
    with pytest.warns(sm.UnknownAtomWarning):
        r = sm.sat(m, sm.parse("green | red"))
    assert r.sat == sm.sat(m, sm.parse("red")).sat


def test_malformed_ast_is_an_error():
    with pytest.raises(TypeError):
        sm.sat(model_a(), "not a formula")  # type: ignore[arg-type]


def test_logically_equivalent_on_corpus():
    m = fig2_model()
    corpus = [sm.parse("reachBwd(p, false)")]
    assert not sm.logically_equivalent(m, "x1", "x2", corpus)
    assert sm.logically_equivalent(m, "x1", "x2", [])
    assert sm.logically_equivalent(m, "x2", "x2p", corpus)


def test_logically_equivalent_on_characteristic_corpus():
    # against the corpus of final-round block characteristics, corpus
    # agreement is exactly block membership
    rng = random.Random(56)
    for _ in range(40):
        m = rand_model(rng, 7)
        trace = sm.partition_refine(m)
        last = len(trace.rounds) - 1
        corpus = [
            sm.characteristic_formula(trace, m, b, last)
            for b in range(trace.final.blocks)
        ]
        for i, x in enumerate(m.point_ids):
            for j, y in enumerate(m.point_ids):
                assert sm.logically_equivalent(m, x, y, corpus) == trace.final.same_block(i, j)
