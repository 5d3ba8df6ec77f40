"""Square matrices over ``Z`` or ``Z/m`` as numpy arrays.

``Z/m`` matrices use ``int64`` and are reduced after every product;
``Z`` matrices use ``object`` arrays so entries never overflow.
"""

from __future__ import annotations

import numpy as np

from .errors import NotInvertible, NotSupported
from .rings import Integers, Ring, Zmod


class MatrixAlgebra:
    def __init__(self, ring: Ring, n: int):
        if not isinstance(ring, (Zmod, Integers)):
            raise NotSupported(f"matrix evaluation needs Z or Z/m, got {ring}")
        self.ring = ring
        self.n = n
        self.m = ring.m if isinstance(ring, Zmod) else None
        self.dtype = np.int64 if self.m else object

    def reduce(self, A):
        return A % self.m if self.m else A

    def array(self, rows):
        return self.reduce(np.array(rows, dtype=self.dtype).reshape(self.n, self.n))

    def zeros(self):
        return np.zeros((self.n, self.n), dtype=self.dtype)

    def identity(self):
        return self.reduce(np.eye(self.n, dtype=np.int64).astype(self.dtype))

    def mul(self, A, B):
        return self.reduce(A @ B)

    def add(self, A, B):
        return self.reduce(A + B)

    def sub(self, A, B):
        return self.reduce(A - B)

    def scale(self, c, A):
        return self.reduce(c * A)

    def eq(self, A, B) -> bool:
        return bool(np.array_equal(self.reduce(A), self.reduce(B)))

    def is_identity(self, A) -> bool:
        return self.eq(A, self.identity())

    def key(self, A):
        return self.reduce(np.asarray(A)).astype(np.int64).tobytes() if self.m else tuple(A.flatten())

    def det(self, A) -> int:
        return self.ring.normalize(det_int(A.tolist())) if self.m else det_int(A.tolist())

    def inverse(self, A):
        d = self.det(A)
        if not self.ring.is_unit(d):
            raise NotInvertible("determinant is not a unit")
        adj = adjugate_int(A.tolist())
        inv_d = self.ring.inverse(d)
        return self.reduce(np.array(adj, dtype=self.dtype) * inv_d)

    def to_list(self, A):
        return [[int(x) for x in row] for row in self.reduce(A)]


def det_int(rows) -> int:
    """Bareiss fraction-free determinant of an integer matrix."""
    M = [list(map(int, r)) for r in rows]
    n = len(M)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k]), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def adjugate_int(rows):
    n = len(rows)
    if n == 1:
        return [[1]]
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [r[:j] + r[j + 1:] for k, r in enumerate(rows) if k != i]
            adj[j][i] = (-1) ** (i + j) * det_int(minor)
    return adj


def principal_minor_sums(M):
    """``c_k`` = sum of the ``k x k`` principal minors, for ``k = 1..n``.

    Vectorized over leading axes: ``M`` has shape ``(..., n, n)`` and holds
    integers; results are unreduced integer arrays.
    """
    from itertools import combinations

    n = M.shape[-1]
    out = []
    for k in range(1, n + 1):
        total = 0
        for idx in combinations(range(n), k):
            sub = M[..., list(idx), :][..., :, list(idx)]
            total = total + _det_small(sub)
        out.append(total)
    return out


def _det_small(A):
    """Cofactor determinant along the last two axes (sizes up to 4)."""
    k = A.shape[-1]
    if k == 1:
        return A[..., 0, 0]
    if k == 2:
        return A[..., 0, 0] * A[..., 1, 1] - A[..., 0, 1] * A[..., 1, 0]
    total = 0
    for j in range(k):
        minor = np.delete(np.delete(A, 0, axis=-2), j, axis=-1)
        total = total + (-1) ** j * A[..., 0, j] * _det_small(minor)
    return total
