import numpy as np
import pytest

from steinlab.elimination import (build_eliminated, composite_root_morphism, cone_meets,
                                  express_eliminated_generator, verify_elim_identities, witness_neighbor)
from steinlab.errors import HypothesisNotMet, InvalidWitness
from steinlab.linalg import Subspace
from steinlab.rings import Zmod
from steinlab.rootsys import are_neighbors, is_k_small, root_spanned_subspaces
from steinlab.steingrp import (Letter, SteinbergWord, make_block_pinning_gl, make_split_pinning_sl,
                               st_evaluate)


def sl4(m):
    return make_split_pinning_sl(4, Zmod(m))


def span(pin, *roots):
    return Subspace.span(list(roots), pin.phi.dim)


def test_build_examples():
    pin = sl4(3)
    full = build_eliminated(pin, [])
    assert full.generators == pin.order and full.eliminated == ()
    a = pin.root(0, 1)
    ep = build_eliminated(pin, [a])
    neg = tuple(-v for v in a)
    assert a not in ep.generators and neg not in ep.generators
    assert set(ep.eliminated) == {a, neg}
    everything = build_eliminated(pin, list(pin.order))
    assert everything.generators == ()


def test_cone_meets():
    V = Subspace.span([(1, -1, 0, 0)], 4)
    assert cone_meets(V, (1, 0, -1, 0), (0, -1, 1, 0))
    assert not cone_meets(V, (1, 0, -1, 0), (0, 1, -1, 0))


def test_composite_root_morphism_block_pinning():
    pin = make_block_pinning_gl(4, 1, Zmod(3))
    alpha = pin.root(0, 1)
    ep = build_eliminated(pin, [alpha])
    beta = witness_neighbor(ep, alpha)
    assert beta is not None and beta not in ep.vset and are_neighbors(pin.phi, alpha, beta)
    for p in range(3):
        for q in range(3):
            w = composite_root_morphism(ep, alpha, beta, p, q)
            assert all(l.root not in ep.vset for l in w)
            dev = (st_evaluate(w) - np.eye(4, dtype=np.int64)) % 3
            i, j = pin.pair(alpha)
            # the evaluation is I + f E_ij with f = +-pq
            assert np.count_nonzero(dev) <= 1 and dev[i, j] in ((p * q) % 3, (-p * q) % 3)
            if p == 0 or q == 0:
                assert len(w) == 0


def test_composite_rejects_bad_witness():
    pin = sl4(2)
    alpha = pin.root(0, 1)
    ep = build_eliminated(pin, [alpha])
    with pytest.raises(InvalidWitness):
        composite_root_morphism(ep, alpha, pin.root(2, 3), 1, 1)  # orthogonal, not a neighbor
    with pytest.raises(InvalidWitness):
        composite_root_morphism(ep, pin.root(0, 2), pin.root(0, 1), 1, 1)  # not eliminated


def test_express_examples():
    pin = sl4(5)
    alpha = pin.root(0, 1)
    ep = build_eliminated(pin, [alpha])
    for p in range(5):
        w = express_eliminated_generator(ep, alpha, p)
        assert all(l.root not in ep.vset for l in w)
        assert np.array_equal(st_evaluate(w), pin.t(alpha, p))
    assert len(express_eliminated_generator(ep, alpha, 0)) == 0
    zero = build_eliminated(pin, [])
    w = express_eliminated_generator(zero, alpha, 3)
    assert w.same_letters(SteinbergWord(pin, [Letter(alpha, 3)]))


def test_include_rejects_eliminated_letters():
    pin = sl4(2)
    alpha = pin.root(0, 1)
    ep = build_eliminated(pin, [alpha])
    with pytest.raises(InvalidWitness):
        ep.include(SteinbergWord(pin, [Letter(alpha, 1)]))


@pytest.mark.parametrize("m", [2, 3])
def test_verify_all_small_subspaces_sl4(m):
    pin = sl4(m)
    for V in root_spanned_subspaces(pin.phi):
        if is_k_small(pin.phi, V, 2):
            report = verify_elim_identities(build_eliminated(pin, V), battery="bij")
        elif is_k_small(pin.phi, V, 1):
            report = verify_elim_identities(build_eliminated(pin, V), battery="sur")
        else:
            continue
        assert report.ok, (V, report.failures())


def test_zero_subspace_degenerates_to_relations():
    pin = sl4(2)
    report = verify_elim_identities(build_eliminated(pin, []), battery="bij")
    assert report.ok
    # nothing is eliminated, so every commutator relation is kept
    n_pairs = sum(1 for a in pin.order for b in pin.order if a != b and a != tuple(-v for v in b))
    assert report.check("vacuous_commutators").instances == n_pairs * 4
    assert report.check("composite_additive").instances == 0


def test_hypothesis_gate():
    pin = sl4(2)
    with pytest.raises(HypothesisNotMet):
        verify_elim_identities(build_eliminated(pin, list(pin.order)), battery="sur")
    big = span(pin, pin.root(0, 1), pin.root(1, 2))
    assert not is_k_small(pin.phi, big, 2)
    with pytest.raises(HypothesisNotMet):
        verify_elim_identities(build_eliminated(pin, big), battery="bij")


def test_corrupted_sign_is_caught():
    pin = sl4(3)
    alpha = pin.root(0, 1)
    bad = pin.with_sign_flipped(pin.root(0, 2), pin.root(2, 1))
    report = verify_elim_identities(build_eliminated(bad, [alpha]), battery="bij")
    assert not report.ok
    assert report.failures()[0].counterexample is not None
