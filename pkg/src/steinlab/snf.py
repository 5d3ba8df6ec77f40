"""Integer Smith normal form with unimodular transforms.

``smith_normal_form(A)`` returns ``(U, D, V)`` with ``U A V = D`` diagonal and
each diagonal entry dividing the next.  ``QuotientLattice`` uses the
transforms to give canonical coordinates in ``Z^c / rowspace(A)``.
"""

from __future__ import annotations


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(A):
    A = [list(map(int, row)) for row in A]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    U = _identity(rows)
    V = _identity(cols)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (A, V):
            for r in M:
                r[i], r[j] = r[j], r[i]

    def add_row(dst, src, f):  # row_dst += f * row_src
        if f:
            A[dst] = [a + f * b for a, b in zip(A[dst], A[src])]
            U[dst] = [a + f * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, f):  # col_dst += f * col_src
        if f:
            for M in (A, V):
                for r in M:
                    r[dst] += f * r[src]

    t = 0
    while t < min(rows, cols):
        # pivot: smallest nonzero absolute value in the trailing block
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        done = False
        while not done:
            done = True
            p = A[t][t]
            for i in range(t + 1, rows):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    if A[i][t]:
                        swap_rows(t, i)
                        done = False
                        break
            if not done:
                continue
            p = A[t][t]
            for j in range(t + 1, cols):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    if A[t][j]:
                        swap_cols(t, j)
                        done = False
                        break
            if not done:
                continue
            # divisibility of the remaining block by the pivot
            p = A[t][t]
            for i in range(t + 1, rows):
                if any(A[i][j] % p for j in range(t + 1, cols)):
                    add_row(t, i, 1)
                    done = False
                    break
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
        t += 1
    return U, A, V


def invariant_factors(A):
    _, D, _ = smith_normal_form(A)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0)) if D[i][i]]


class QuotientLattice:
    """``Z^c`` modulo the row lattice of an integer relation matrix."""

    def __init__(self, relations, ncols):
        self.ncols = ncols
        rel = [list(r) for r in relations] or [[0] * ncols]
        U, D, V = smith_normal_form(rel)
        self.V = V
        diag = [D[i][i] if i < len(D) else 0 for i in range(ncols)]
        self.moduli = diag  # 0 means a free coordinate

    def canonical(self, v):
        w = [sum(v[i] * self.V[i][k] for i in range(self.ncols)) for k in range(self.ncols)]
        return tuple(x % d if d else x for x, d in zip(w, self.moduli))

    def equal(self, u, v):
        return self.canonical(u) == self.canonical(v)

    def is_zero(self, v):
        return not any(self.canonical(v))

    @property
    def order(self):
        """Group order, or None when the quotient is infinite."""
        if any(d == 0 for d in self.moduli):
            return None
        out = 1
        for d in self.moduli:
            out *= d
        return out

    @property
    def invariants(self):
        return [d for d in self.moduli if d != 1]
