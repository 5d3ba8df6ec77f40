import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from steinlab.linalg import Subspace, rank, rref
from steinlab.snf import QuotientLattice, invariant_factors, smith_normal_form

small_ints = st.integers(-6, 6)


def matrices(max_rows=4, max_cols=4):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small_ints, min_size=c, max_size=c), min_size=r, max_size=r)))


def matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


@settings(max_examples=300, deadline=None)
@given(matrices())
def test_snf_transforms_and_divisibility(A):
    U, D, V = smith_normal_form(A)
    assert matmul(matmul(U, A), V) == D
    assert abs(sympy.Matrix(U).det()) == 1 and abs(sympy.Matrix(V).det()) == 1
    diag = [D[i][i] for i in range(min(len(D), len(D[0])))]
    assert all(D[i][j] == 0 for i in range(len(D)) for j in range(len(D[0])) if i != j)
    for a, b in zip(diag, diag[1:]):
        assert b == 0 or (a != 0 and b % a == 0)


@settings(max_examples=300, deadline=None)
@given(matrices())
def test_snf_matches_sympy(A):
    ours = invariant_factors(A)
    S = sympy_snf(sympy.Matrix(A), domain=sympy.ZZ)
    theirs = [abs(int(S[i, i])) for i in range(min(S.shape)) if S[i, i] != 0]
    assert ours == theirs


@settings(max_examples=200, deadline=None)
@given(matrices(3, 3), st.lists(small_ints, min_size=3, max_size=3))
def test_quotient_lattice_kills_relations(A, v):
    A = [row + [0] * (3 - len(row)) for row in A]
    Q = QuotientLattice(A, 3)
    for row in A:
        assert Q.is_zero(row)
        assert Q.equal([x + y for x, y in zip(v, row)], v)


@settings(max_examples=300, deadline=None)
@given(matrices(4, 4))
def test_rank_and_rref_match_sympy(A):
    r = sympy.Matrix(A).rank()
    assert rank(A) == r
    rows, piv = rref(A)
    assert len(rows) == r
    assert sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in rows] or [[0] * len(A[0])]) \
        .rank() == r


@settings(max_examples=200, deadline=None)
@given(matrices(3, 4), matrices(3, 4))
def test_subspace_intersection_dimension(A, B):
    n = max(len(A[0]), len(B[0]))
    A = [row + [0] * (n - len(row)) for row in A]
    B = [row + [0] * (n - len(row)) for row in B]
    U, W = Subspace.span(A, n), Subspace.span(B, n)
    expected = sympy.Matrix(A).rank() + sympy.Matrix(B).rank() - sympy.Matrix(A + B).rank()
    assert U.intersect(W).dim == expected == U.intersect_dim(W)
    for row in U.intersect(W).rows:
        assert U.contains(row) and W.contains(row)
