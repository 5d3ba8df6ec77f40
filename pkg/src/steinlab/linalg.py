"""Exact rational linear algebra on short integer/rational vectors."""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm


def rref(rows, ncols=None):
    """Reduced row echelon form over Q.

    Returns ``(rows, pivots)`` with rows as tuples of ``Fraction``; zero rows
    are dropped.
    """
    mat = [[Fraction(x) for x in r] for r in rows]
    if ncols is None:
        ncols = len(mat[0]) if mat else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        lead = mat[r][c]
        if lead != 1:
            mat[r] = [x / lead for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return [tuple(row) for row in mat[:r]], pivots


def rank(vectors) -> int:
    """Rank of integer vectors by fraction-free elimination."""
    rows = [list(v) for v in vectors if any(v)]
    if not rows:
        return 0
    ncols = len(rows[0])
    rk = 0
    for c in range(ncols):
        piv = next((i for i in range(rk, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[rk], rows[piv] = rows[piv], rows[rk]
        p = rows[rk]
        for i in range(rk + 1, len(rows)):
            a = rows[i][c]
            if a:
                b = p[c]
                row = [b * x - a * y for x, y in zip(rows[i], p)]
                g = 0
                for x in row:
                    g = gcd(g, x)
                rows[i] = [x // g for x in row] if g > 1 else row
        rk += 1
        if rk == len(rows):
            break
    return rk


def integer_row(vec):
    """Scale a rational vector to a primitive integer vector (sign preserved)."""
    den = 1
    for x in vec:
        den = lcm(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return tuple(x // g for x in ints) if g else tuple(ints)


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


class Subspace:
    """A rational subspace of Q^n, kept in reduced echelon form."""

    __slots__ = ("n", "rows", "pivots", "_key")

    def __init__(self, n: int, rows=(), pivots=None):
        self.n = n
        if pivots is None:
            rows, pivots = rref(rows, n) if rows else ([], [])
        self.rows = tuple(rows)
        self.pivots = tuple(pivots)
        self._key = (n, self.rows)

    @classmethod
    def span(cls, vectors, n=None):
        vectors = [tuple(v) for v in vectors]
        if n is None:
            if not vectors:
                raise ValueError("ambient dimension needed for an empty span")
            n = len(vectors[0])
        return cls(n, vectors)

    @classmethod
    def zero(cls, n):
        return cls(n, ())

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def common_denominator(self) -> int:
        den = 1
        for row in self.rows:
            for x in row:
                den = lcm(den, x.denominator)
        return den

    @property
    def integer_basis(self):
        """Echelon basis as integer vectors over ``common_denominator``."""
        den = self.common_denominator
        return [tuple(int(x * den) for x in row) for row in self.rows]

    def residue(self, v):
        """Canonical representative of ``v`` modulo the subspace."""
        res = [Fraction(x) for x in v]
        for row, p in zip(self.rows, self.pivots):
            c = res[p]
            if c:
                res = [a - c * b for a, b in zip(res, row)]
        return tuple(res)

    def contains(self, v) -> bool:
        return not any(self.residue(v))

    def __contains__(self, v):
        return self.contains(v)

    def __add__(self, other):
        return Subspace(self.n, list(self.rows) + list(other.rows))

    def add_vectors(self, vectors):
        return Subspace(self.n, list(self.rows) + [tuple(v) for v in vectors])

    def intersect_dim(self, other) -> int:
        return self.dim + other.dim - (self + other).dim

    def intersect(self, other):
        """Intersection via the kernel of [self; -other] (small dimensions only)."""
        a = [list(r) for r in self.rows]
        b = [list(r) for r in other.rows]
        if not a or not b:
            return Subspace.zero(self.n)
        # solve sum x_i a_i = sum y_j b_j: kernel of the transpose system
        cols = [r for r in a] + [[-x for x in r] for r in b]
        system = [[cols[k][i] for k in range(len(cols))] for i in range(self.n)]
        red, piv = rref(system, len(cols))
        free = [k for k in range(len(cols)) if k not in piv]
        vecs = []
        for fcol in free:
            sol = [Fraction(0)] * len(cols)
            sol[fcol] = Fraction(1)
            for row, p in zip(red, piv):
                sol[p] = -row[fcol]
            v = [sum(sol[i] * a[i][t] for i in range(len(a))) for t in range(self.n)]
            vecs.append(v)
        return Subspace(self.n, vecs)

    def __eq__(self, other):
        return isinstance(other, Subspace) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"Subspace(n={self.n}, basis={self.integer_basis}, den={self.common_denominator})"

    def to_dict(self):
        return {"n": self.n, "denominator": self.common_denominator,
                "basis": [list(r) for r in self.integer_basis]}
