import itertools
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from steinlab.errors import HypothesisNotMet, InvalidRootSystem
from steinlab.linalg import Subspace
from steinlab.rootsys import (are_neighbors, build_root_system, certify_small_subsp, check_vacuous_row,
                              classify_subset, is_k_small, parse_system, rank2_saturated_through, reflect,
                              root_spanned_subspaces, table_vacuous_rel, weyl_orbit)

SYSTEMS = ["A2", "A3", "B2", "B3", "C3", "D3", "D4", "BC2", "BC3"]


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def open_cone_hits(phi, a, b):
    """Roots g = x a + y b with x, y > 0, solved with sympy."""
    x, y = sympy.symbols("x y")
    hits = []
    for g in phi.roots:
        eqs = [x * a[i] + y * b[i] - g[i] for i in range(len(a))]
        for sol in sympy.linsolve(eqs, x, y):
            if all(v.is_number for v in sol) and sol[0] > 0 and sol[1] > 0:
                hits.append(g)
    return hits


def neighbors_oracle(phi, a, b):
    indep = sympy.Matrix([a, b]).rank() == 2
    return indep and dot(a, b) != 0 and not open_cone_hits(phi, a, b)


# --- construction ---------------------------------------------------------

def test_root_counts():
    assert len(build_root_system("BC", 3).roots) == 24
    assert set(build_root_system("A", 1).roots) == {(1, -1), (-1, 1)}
    d3 = build_root_system("D", 3)
    expected = {tuple(s * (i == k) + t * (j == k) for k in range(3))
                for i, j in itertools.combinations(range(3), 2) for s in (1, -1) for t in (1, -1)}
    assert set(d3.roots) == expected and len(expected) == 12


def test_bad_systems():
    with pytest.raises(InvalidRootSystem):
        build_root_system("E", 6)
    with pytest.raises(InvalidRootSystem):
        build_root_system("A", 0)
    with pytest.raises(InvalidRootSystem):
        parse_system("BC")


@pytest.mark.parametrize("name", SYSTEMS)
def test_closed_under_reflections(name):
    phi = parse_system(name)
    roots = set(phi.roots)
    for a, b in itertools.product(phi.roots, repeat=2):
        assert reflect(a, b) in roots


# --- reflections and neighbors ----------------------------------------------

def test_reflect_examples():
    assert reflect((1, -1, 0), (0, 1, -1)) == (1, 0, -1)
    assert reflect((1, -1, 0), (1, -1, 0)) == (-1, 1, 0)
    assert reflect((1, -1, 0, 0), (0, 0, 1, -1)) == (0, 0, 1, -1)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(SYSTEMS), st.data())
def test_reflect_is_involution_and_isometry(name, data):
    phi = parse_system(name)
    a = data.draw(st.sampled_from(phi.roots))
    b = data.draw(st.sampled_from(phi.roots))
    c = data.draw(st.sampled_from(phi.roots))
    assert reflect(a, reflect(a, b)) == b
    assert dot(reflect(a, b), reflect(a, c)) == dot(b, c)


def test_neighbor_examples():
    a3 = parse_system("A3")
    assert are_neighbors(a3, (1, -1, 0, 0), (1, 0, -1, 0))
    assert not are_neighbors(a3, (1, -1, 0, 0), (0, 1, -1, 0))
    a4 = parse_system("A4")
    assert not are_neighbors(a4, (1, -1, 0, 0, 0), (0, 0, 1, -1, 0))


@pytest.mark.parametrize("name", ["A3", "B3", "BC3"])
def test_neighbors_match_sympy_oracle(name):
    phi = parse_system(name)
    for a, b in itertools.product(phi.roots, repeat=2):
        assert are_neighbors(phi, a, b) == neighbors_oracle(phi, a, b), (a, b)


# --- subsets ------------------------------------------------------------------

def test_classify_examples():
    a3 = parse_system("A3")
    pos = [r for r in a3.roots if next(x for x in r if x) > 0]
    c = classify_subset(a3, pos)
    assert (c.closed, c.unipotent, c.saturated) == (True, True, False)
    c = classify_subset(a3, a3.roots)
    assert (c.closed, c.unipotent, c.saturated) == (True, False, True)
    assert not classify_subset(a3, [(1, -1, 0, 0), (0, 1, -1, 0)]).closed


def test_half_space_functional_certifies_unipotence():
    a3 = parse_system("A3")
    pos = [r for r in a3.roots if next(x for x in r if x) > 0]
    f = classify_subset(a3, pos).functional
    assert all(dot(f, r) > 0 for r in pos)


def test_rank2_saturated_examples():
    d3 = parse_system("D3")
    psi = {(1, 1, 0), (-1, -1, 0), (1, 0, 1), (-1, 0, -1), (0, 1, -1), (0, -1, 1)}
    found = [set(s.elements) for s in rank2_saturated_through(d3, (1, 1, 0))]
    assert psi in found
    a2 = parse_system("A2")
    assert [set(s.elements) for s in rank2_saturated_through(a2, (1, -1, 0))] == [set(a2.roots)]
    bc2 = parse_system("BC2")
    assert [set(s.elements) for s in rank2_saturated_through(bc2, (1, 0))] == [set(bc2.roots)]


@pytest.mark.parametrize("name", ["A3", "B3", "D4"])
def test_rank2_subsystems_are_saturated_and_rank2(name):
    phi = parse_system(name)
    for a in phi.roots[:4]:
        for s in rank2_saturated_through(phi, a):
            assert a in s
            assert sympy.Matrix(list(s.elements)).rank() == 2
            assert classify_subset(phi, s.elements).saturated


# --- small subspaces -------------------------------------------------------------

def test_smallness_examples():
    d3 = parse_system("D3")
    V1 = Subspace.span([(1, 1, 0)], 3)
    V2 = Subspace.span([(1, 1, 0), (1, 0, 1)], 3)
    assert is_k_small(d3, V1, 1) and is_k_small(d3, V1, 2)
    assert is_k_small(d3, V2, 1) and not is_k_small(d3, V2, 2)
    for k in range(d3.rank + 1):
        assert is_k_small(d3, Subspace.zero(3), k)


def test_certify_examples():
    d3 = parse_system("D3")
    r = certify_small_subsp(d3, 1, Subspace.span([(1, 1, 0)], 3), (1, 1, 0))
    assert r.status == "certificate"
    assert set(r.psi) == {(1, 1, 0), (-1, -1, 0), (1, 0, 1), (-1, 0, -1), (0, 1, -1), (0, -1, 1)}
    psi_span = Subspace.span(list(r.psi), 3)
    assert psi_span.intersect(r.V) == Subspace.span([(1, 1, 0)], 3)

    a2 = parse_system("A2")
    r = certify_small_subsp(a2, 1, Subspace.span([(1, -1, 0)], 3), (1, -1, 0))
    assert r.status == "certificate" and set(r.psi) == set(a2.roots)


def test_certify_claim3_example_needs_smallness_relaxed():
    bc3 = parse_system("BC3")
    V = Subspace.span([(1, 0, 0), (0, 1, 1)], 3)
    # V has codimension 1 in R^3, so the 2-small hypothesis is not met
    with pytest.raises(HypothesisNotMet):
        certify_small_subsp(bc3, 3, V, (1, 0, 0), (0, 1, 1))
    r = certify_small_subsp(bc3, 3, V, (1, 0, 0), (0, 1, 1), enforce_smallness=False)
    assert r.status == "certificate"
    assert (0, 1, 1) not in r.psi
    assert Subspace.span(list(r.psi), 3).intersect(V) == Subspace.span([(1, 0, 0)], 3)


def test_root_spanned_subspaces_a2():
    a2 = parse_system("A2")
    subs = root_spanned_subspaces(a2)
    # zero, three root lines, the whole plane
    assert [V.dim for V in subs] == [0, 1, 1, 1, 2]


# --- Weyl orbits -------------------------------------------------------------------

def test_weyl_orbits():
    a3 = parse_system("A3")
    assert {next(iter(s)) for s in weyl_orbit(a3, {(1, -1, 0, 0)})} == set(a3.roots)
    assert weyl_orbit(a3, set()) == [frozenset()]
    c2 = parse_system("C2")
    long_roots = {r for r in c2.roots if dot(r, r) == 4}
    assert {next(iter(s)) for s in weyl_orbit(c2, {(2, 0)})} == long_roots and len(long_roots) == 4


# --- the table of vacuous relations ---------------------------------------------------

def test_table_rows():
    rows = table_vacuous_rel()
    assert len(rows) == 9
    assert any(r.psi_type == "A3" and r.alpha == ((1, 0, 1),) and r.beta == ((0, 1, 1),)
               and r.angle == "pi/3" and r.gamma == ((1, 1, 0),) for r in rows)
    assert any(r.alpha == ((1, 1, 0),) and r.beta == ((0, -1, 1),)
               and r.angle == "2pi/3" and r.gamma == ((0, 1, 1),) for r in rows)
    for r in rows:
        assert check_vacuous_row(r) == []


def test_table_gamma_outside_plane():
    for r in table_vacuous_rel():
        for a, b, g in itertools.product(r.alpha, r.beta, r.gamma):
            assert sympy.Matrix([a, b, g]).rank() == 3


def test_table_angles_by_sympy():
    cos = {"pi/4": sympy.sqrt(2) / 2, "pi/3": Fraction(1, 2), "pi/2": 0, "2pi/3": Fraction(-1, 2),
           "3pi/4": -sympy.sqrt(2) / 2}
    for r in table_vacuous_rel():
        for a, b in itertools.product(r.alpha, r.beta):
            got = sympy.nsimplify(dot(a, b)) / sympy.sqrt(dot(a, a) * dot(b, b))
            assert sympy.simplify(got - cos[r.angle]) == 0
