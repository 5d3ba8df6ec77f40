import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steinlab.errors import TypeMismatch
from steinlab.nilmod import (SplitNilModule, all_binary_cocycles, central_scale, nil_add, nil_commutator, nil_neg,
                             nil_scale, nil_tau, verify_module_identities)
from steinlab.rings import Zmod

# c(x, y) = x_1 y_2 on rank1 = 2, rank0 = 1
X1Y2 = SplitNilModule(2, 1, (((0,), (1,)), ((0,), (0,))))
# c(x, y) = x y on rank1 = rank0 = 1
XY = SplitNilModule(1, 1, (((1,),),))


def el(module, ring, m0, m1):
    return module.element(ring, m0, m1)


def as_pair(x):
    return tuple(int(v) for v in x.m0), tuple(int(v) for v in x.m1)


# --- worked examples --------------------------------------------------------------

def test_add_example():
    R = Zmod(3)
    got = nil_add(el(X1Y2, R, (1,), (1, 0)), el(X1Y2, R, (0,), (0, 1)))
    assert as_pair(got) == ((2,), (1, 1))


def test_scale_example():
    R = Zmod(3)
    assert as_pair(nil_scale(el(X1Y2, R, (1,), (1, 0)), 2)) == ((1,), (2, 0))


def test_tau_example():
    R = Zmod(5)
    assert as_pair(nil_tau(el(XY, R, (1,), (2,)))) == ((3,), (0,))


def test_commutator_example():
    R = Zmod(3)
    got = nil_commutator(el(X1Y2, R, (0,), (1, 0)), el(X1Y2, R, (0,), (0, 1)))
    assert as_pair(got) == ((1,), (0, 0))


def test_trivial_examples():
    R = Zmod(4)
    x = el(X1Y2, R, (3,), (2, 1))
    zero = X1Y2.zero(R)
    assert nil_add(x, zero).same_as(x)
    assert as_pair(nil_scale(x, 0)) == ((0,), (0, 0))
    assert nil_scale(x, 1).same_as(x)
    assert as_pair(nil_tau(el(X1Y2, R, (3,), (0, 0)))) == ((2,), (0, 0))
    assert nil_tau(zero).same_as(zero)
    assert nil_commutator(x, x).same_as(zero)
    assert nil_commutator(x, zero).same_as(zero)
    z, w = el(X1Y2, R, (1,), (0, 0)), el(X1Y2, R, (2,), (0, 0))
    assert nil_add(z, w).same_as(nil_add(w, z))


def test_mismatched_modules():
    R = Zmod(3)
    with pytest.raises(TypeMismatch):
        nil_add(el(X1Y2, R, (0,), (0, 0)), el(XY, R, (0,), (0,)))
    with pytest.raises(TypeMismatch):
        SplitNilModule(1, 1, (((1, 1),),))


# --- Heisenberg matrix oracle for c(x, y) = x y --------------------------------------

def heis(x, m):
    a1, = (int(v) for v in x.m1)
    a0, = (int(v) for v in x.m0)
    return np.array([[1, a1, a0], [0, 1, a1], [0, 0, 1]], dtype=np.int64) % m


@pytest.mark.parametrize("m", [2, 3, 4, 5, 9])
def test_heisenberg_oracle(m):
    R = Zmod(m)
    elems = [el(XY, R, (a,), (b,)) for a in range(m) for b in range(m)]
    units = [k for k in range(m) if np.gcd(k, m) == 1]
    for x in elems:
        X = heis(x, m)
        for y in elems:
            Y = heis(y, m)
            assert np.array_equal(heis(nil_add(x, y), m), X @ Y % m)
        assert np.array_equal(heis(nil_add(x, nil_neg(x)), m), np.eye(3, dtype=np.int64))
        for k in units:
            D = np.diag([k * k % m, k, 1])
            Dinv = np.diag([pow(k * k, -1, m), pow(k, -1, m), 1])
            assert np.array_equal(heis(nil_scale(x, k), m), D @ X @ Dinv % m)


# --- identities as properties ------------------------------------------------------------

MODULES = [SplitNilModule(r1, r0, c) for r1 in range(3) for r0 in range(3) for c in all_binary_cocycles(r1, r0)
           if r1 * r1 * r0 <= 4]


@st.composite
def points(draw):
    m = draw(st.sampled_from([2, 3, 4, 5, 6, 9]))
    module = draw(st.sampled_from(MODULES))
    R = Zmod(m)
    coords = st.integers(0, m - 1)

    def point():
        return el(module, R, [draw(coords) for _ in range(module.rank0)],
                  [draw(coords) for _ in range(module.rank1)])

    return R, point(), point(), point(), draw(coords), draw(coords)


@settings(max_examples=300, deadline=None)
@given(points())
def test_group_axioms(data):
    R, x, y, z, _, _ = data
    assert nil_add(nil_add(x, y), z).same_as(nil_add(x, nil_add(y, z)))
    assert nil_add(x, nil_neg(x)).same_as(x.module.zero(R))


@settings(max_examples=300, deadline=None)
@given(points())
def test_scalar_identities(data):
    R, x, y, _, k, k2 = data
    lhs = nil_scale(x, R.add(k, k2))
    rhs = nil_add(nil_add(nil_scale(x, k), central_scale(nil_tau(x), R.mul(k, k2))), nil_scale(x, k2))
    assert lhs.same_as(rhs)
    assert nil_tau(nil_scale(x, k)).same_as(central_scale(nil_tau(x), R.mul(k, k)))
    tau_sum = nil_add(nil_add(nil_tau(x), nil_commutator(x, y)), nil_tau(y))
    assert nil_tau(nil_add(x, y)).same_as(tau_sum)
    assert nil_commutator(nil_scale(x, k), nil_scale(y, k2)).same_as(
        central_scale(nil_commutator(x, y), R.mul(k, k2)))


@settings(max_examples=200, deadline=None)
@given(points())
def test_commutators_are_central(data):
    R, x, y, z, _, _ = data
    c = nil_commutator(x, y)
    assert c.is_central_part()
    assert nil_add(c, z).same_as(nil_add(z, c))


def test_verify_module_identities_small():
    for module in MODULES[:6]:
        for m in (2, 3):
            results = verify_module_identities(module, Zmod(m))
            assert results and all(r.ok for r in results)
            assert any(r.instances > 0 for r in results)


def test_binary_cocycle_count():
    assert sum(1 for _ in all_binary_cocycles(2, 2)) == 2 ** 8
    assert list(all_binary_cocycles(0, 2)) == [()]
