import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steinlab.errors import NotInvertible, NotUnipotent, RankTooSmall
from steinlab.rings import HomotopeLevel, Integers, Zmod
from steinlab.steingrp import (Letter, SteinbergWord, bracket_lift, check_relations, check_root_units,
                               collect_unipotent, collection_battery, commutator_expand, commutator_word,
                               make_block_pinning_gl, make_pinning, make_split_pinning_sl, perfectness_witness,
                               st_evaluate, unitriangular_word, weyl_conjugate, weyl_from)


def elem(n, i, j, a, m):
    """I + a E_ij over Z/m (1-based indices), built without the library."""
    M = np.eye(n, dtype=np.int64)
    M[i - 1, j - 1] = (M[i - 1, j - 1] + a) % m
    return M


def mat_inv(M, m):
    import sympy
    return np.array(sympy.Matrix(M.tolist()).inv_mod(m).tolist(), dtype=np.int64)


def comm(A, B, m):
    return A @ B @ mat_inv(A, m) @ mat_inv(B, m) % m


def x(pin, i, j, v, coeffs=None):
    return SteinbergWord(pin, [Letter(pin.root(i - 1, j - 1), v)], coeffs)


# --- pinnings -------------------------------------------------------------------------

def test_sl3_commutator_example():
    pin = make_split_pinning_sl(3, Zmod(7))
    w = commutator_word(x(pin, 1, 2, 2), x(pin, 2, 3, 3))
    assert np.array_equal(st_evaluate(w), elem(3, 1, 3, 6, 7))
    assert np.array_equal(st_evaluate(w), comm(elem(3, 1, 2, 2, 7), elem(3, 2, 3, 3, 7), 7))
    assert len(commutator_expand(pin.root(0, 1), 5, pin.root(0, 2), 4, pin)) == 0


@pytest.mark.parametrize("n,m", [(3, 2), (3, 3), (4, 2), (4, 3)])
def test_commutator_formula_against_matrices(n, m):
    pin = make_split_pinning_sl(n, Zmod(m))
    for a, b in itertools.permutations(pin.order, 2):
        if a == tuple(-v for v in b):
            continue
        (i, j), (k, l) = pin.pair(a), pin.pair(b)
        for p, q in itertools.product(range(m), repeat=2):
            lhs = comm(elem(n, i + 1, j + 1, p, m), elem(n, k + 1, l + 1, q, m), m)
            assert np.array_equal(st_evaluate(commutator_expand(a, p, b, q, pin)), lhs)


def test_sl4_relations_exhaustive():
    report = check_relations(make_split_pinning_sl(4, Zmod(2)))
    assert report.ok
    assert report.check("commutator").instances == 132 * 4


def test_small_rank_rejected():
    with pytest.raises(RankTooSmall):
        make_split_pinning_sl(2, Zmod(3))
    with pytest.raises(RankTooSmall):
        make_block_pinning_gl(2, 2, Zmod(3))


def test_block_pinning_commutator_exhaustive():
    pin = make_block_pinning_gl(3, 2, Zmod(2))
    blocks = [np.array(b, dtype=np.int64) for b in itertools.product((0, 1), repeat=4)]
    r12, r23, r13 = pin.root(0, 1), pin.root(1, 2), pin.root(0, 2)
    for X, Y in itertools.product(blocks, repeat=2):
        X2, Y2 = tuple(map(tuple, X.reshape(2, 2))), tuple(map(tuple, Y.reshape(2, 2)))
        w = commutator_word(SteinbergWord(pin, [Letter(r12, X2)]), SteinbergWord(pin, [Letter(r23, Y2)]))
        XY = tuple(map(tuple, (X.reshape(2, 2) @ Y.reshape(2, 2)) % 2))
        assert np.array_equal(st_evaluate(w), pin.t(r13, XY))


def test_zero_block_letter_is_deleted():
    pin = make_block_pinning_gl(3, 2, Zmod(2))
    w = SteinbergWord(pin, [Letter(pin.root(0, 1), ((0, 0), (0, 0)))])
    assert len(w) == 0


def test_block_d1_matches_sl():
    R = Zmod(5)
    sl, gl = make_split_pinning_sl(3, R), make_block_pinning_gl(3, 1, R)
    assert sl.signs == gl.signs
    for r in sl.order:
        for v in range(5):
            assert np.array_equal(sl.t(r, v), gl.t(r, v))


def test_make_pinning_from_config():
    pin = make_pinning({"kind": "gl_block", "k": 3, "d": 2, "ring": "Zmod:2"})
    assert (pin.k, pin.d, pin.size) == (3, 2, 6)


# --- evaluation ------------------------------------------------------------------------

def test_evaluate_examples():
    pin = make_split_pinning_sl(3, Zmod(5))
    assert np.array_equal(st_evaluate(SteinbergWord(pin, [])), np.eye(3, dtype=np.int64))
    w = x(pin, 1, 2, 1) * x(pin, 2, 1, -1) * x(pin, 1, 2, 1)
    assert np.array_equal(st_evaluate(w), np.array([[0, 1, 0], [4, 0, 0], [0, 0, 1]]))


def test_homotope_evaluation_example():
    pin = make_split_pinning_sl(3, Integers())
    C = HomotopeLevel(Integers(), 2, 1)
    point = st_evaluate(x(pin, 1, 2, 3, C))
    assert point.dev[0, 1] == 3
    expected = np.eye(3, dtype=object)
    expected[0, 1] = 6
    assert (point.delta() == expected).all()


@pytest.mark.parametrize("n", [0, 1, 2])
def test_homotope_relations(n):
    pin = make_split_pinning_sl(3, Zmod(4))
    assert check_relations(pin, HomotopeLevel(Zmod(4), 2, n)).ok


# --- collection --------------------------------------------------------------------------

def test_collect_example():
    pin = make_split_pinning_sl(3, Zmod(7))
    pos = [pin.root(0, 1), pin.root(0, 2), pin.root(1, 2)]
    a, b = 3, 5
    got = collect_unipotent(x(pin, 2, 3, b) * x(pin, 1, 2, a), pos, pos)
    assert got.positive_letters() == [(pos[0], a), (pos[1], (-a * b) % 7), (pos[2], b)]
    M = np.eye(3, dtype=np.int64)
    M[0, 1], M[1, 2], M[0, 2] = a, b, 0
    assert np.array_equal(st_evaluate(got), M)
    assert collect_unipotent(got, pos, pos).same_letters(got)
    assert collect_unipotent(x(pin, 1, 2, 2) * x(pin, 1, 2, 3), pos).positive_letters() == [(pos[0], 5)]


def test_collect_rejects_non_unipotent():
    pin = make_split_pinning_sl(3, Zmod(3))
    with pytest.raises(NotUnipotent):
        collect_unipotent(x(pin, 1, 2, 1), [pin.root(0, 1), pin.root(1, 0)])


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([2, 3, 4, 5]), st.lists(st.tuples(st.integers(0, 2), st.integers(0, 10)), max_size=10))
def test_collection_preserves_evaluation(m, letters):
    pin = make_split_pinning_sl(3, Zmod(m))
    pos = [pin.root(0, 1), pin.root(0, 2), pin.root(1, 2)]
    w = SteinbergWord(pin, [Letter(pos[i], v) for i, v in letters])
    c = collect_unipotent(w, pos)
    assert np.array_equal(st_evaluate(c), st_evaluate(w))
    assert len(c) <= 3


def test_collection_battery_small():
    report = collection_battery(make_split_pinning_sl(3, Zmod(3)), count=300, seed=5)
    assert report.ok


def test_unitriangular_word_roundtrip():
    pin = make_split_pinning_sl(4, Zmod(5))
    rng = np.random.default_rng(0)
    for _ in range(20):
        U = np.triu(rng.integers(0, 5, (4, 4)), 1) + np.eye(4, dtype=np.int64)
        assert np.array_equal(st_evaluate(unitriangular_word(pin, U)), U % 5)
        L = U.T
        assert np.array_equal(st_evaluate(unitriangular_word(pin, L, upper=False)), L % 5)


# --- Weyl triples ---------------------------------------------------------------------------

def test_weyl_from_examples():
    pin = make_split_pinning_sl(3, Zmod(5))
    wt = weyl_from(pin.root(0, 1), 1, pin)
    assert np.array_equal(wt.w, np.array([[0, 1, 0], [4, 0, 0], [0, 0, 1]]))
    with pytest.raises(NotInvertible):
        weyl_from(pin.root(0, 1), 0, pin)
    gl = make_block_pinning_gl(3, 2, Zmod(2))
    wt = weyl_from(gl.root(0, 1), ((1, 0), (0, 1)), gl)
    swap = np.zeros((6, 6), dtype=np.int64)
    swap[0:2, 2:4] = np.eye(2, dtype=np.int64)
    swap[2:4, 0:2] = np.eye(2, dtype=np.int64)  # -1 = 1 mod 2
    swap[4:6, 4:6] = np.eye(2, dtype=np.int64)
    assert np.array_equal(wt.w, swap)


def test_weyl_conjugate_examples():
    pin = make_split_pinning_sl(3, Zmod(7))
    wt = weyl_from(pin.root(0, 1), 1, pin)
    for q in range(7):
        gamma, q2 = weyl_conjugate(wt, pin.root(1, 2), q, pin)
        assert gamma == pin.root(0, 2) and q2 in (q, (-q) % 7)
        expected = wt.w @ elem(3, 2, 3, q, 7) @ mat_inv(wt.w, 7) % 7
        assert np.array_equal(pin.t(gamma, q2), expected)
    pin4 = make_split_pinning_sl(4, Zmod(5))
    wt = weyl_from(pin4.root(0, 1), 2, pin4)
    gamma, q2 = weyl_conjugate(wt, pin4.root(2, 3), 3, pin4)
    assert gamma == pin4.root(2, 3) and q2 in (3, 2)


@pytest.mark.parametrize("spec", [{"kind": "sl", "n": 3, "ring": "Zmod:3"},
                                  {"kind": "gl_block", "k": 3, "d": 2, "ring": "Zmod:2"}])
def test_root_units(spec):
    report = check_root_units(make_pinning(spec))
    assert report.ok
    assert report.check("claim3_ultrashort").status == "skipped"
    for name in ("claim1_derived_triples", "claim2_weyl_closure", "claim4_uniqueness", "claim5_f_isomorphism"):
        assert report.check(name).status == "pass"


def test_root_units_rank_one_skips_uniqueness():
    report = check_root_units(make_split_pinning_sl(2, Zmod(3), allow_small=True))
    c = report.check("claim4_uniqueness")
    assert c.status == "skipped" and "RankTooSmall" in c.reason


# --- perfectness ---------------------------------------------------------------------------

def test_perfectness_witness():
    pin = make_split_pinning_sl(3, Zmod(5))
    for p in range(5):
        w = perfectness_witness(pin.root(0, 2), p, pin)
        assert np.array_equal(st_evaluate(w), elem(3, 1, 3, p, 5))
    assert len(perfectness_witness(pin.root(0, 2), 0, pin)) == 0
    gl = make_block_pinning_gl(3, 2, Zmod(2))
    X = ((1, 1), (0, 1))
    w = perfectness_witness(gl.root(0, 2), X, gl)
    assert np.array_equal(st_evaluate(w), gl.t(gl.root(0, 2), X))


def test_bracket_lift():
    pin = make_split_pinning_sl(3, Zmod(5))
    empty = SteinbergWord(pin, [])
    I = np.eye(3, dtype=np.int64)
    assert len(bracket_lift(I, I, empty, empty)) == 0
    g, h = elem(3, 1, 2, 1, 5), elem(3, 2, 3, 1, 5)
    w = bracket_lift(g, h, x(pin, 1, 2, 1), x(pin, 2, 3, 1))
    assert np.array_equal(st_evaluate(w), comm(g, h, 5))
