"""Split 2-step nilpotent modules ``M = M0 ∔ M1`` with a bilinear cocycle.

Coordinates live in a coefficient structure exposing ``add``, ``neg``,
``mul`` and ``zero``: a ring from :mod:`steinlab.rings` or a homotope level
``R^(s^n)``.  With ``Zmod`` coefficients the coordinates may also be numpy
arrays, which is how the identity battery sweeps whole carriers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import TypeMismatch


@dataclass(frozen=True)
class SplitNilModule:
    """``rank1``/``rank0`` are the free ranks of ``M/M0`` and ``M0``.

    ``cocycle[a][b][k]`` is the integer coefficient of ``x_a y_b`` in the
    ``k``-th coordinate of ``c(x, y)``; no symmetry is assumed.
    """

    rank1: int
    rank0: int
    cocycle: tuple

    def __post_init__(self):
        c = tuple(tuple(tuple(int(v) for v in row_k) for row_k in row) for row in self.cocycle)
        if len(c) != self.rank1 or any(len(r) != self.rank1 for r in c) or any(
                len(v) != self.rank0 for r in c for v in r):
            raise TypeMismatch(
                f"cocycle must have shape {self.rank1}x{self.rank1}x{self.rank0}")
        object.__setattr__(self, "cocycle", c)

    @classmethod
    def from_dict(cls, data):
        return cls(int(data["rank1"]), int(data["rank0"]), data["cocycle"])

    def to_dict(self):
        return {"rank0": self.rank0, "rank1": self.rank1,
                "cocycle": [[list(v) for v in row] for row in self.cocycle]}

    def terms(self):
        """Nonzero cocycle entries as ``(a, b, k, coefficient)``."""
        return [(a, b, k, v)
                for a, row in enumerate(self.cocycle)
                for b, vec in enumerate(row)
                for k, v in enumerate(vec) if v]

    def element(self, coeffs, m0=None, m1=None):
        m0 = tuple(m0) if m0 is not None else (coeffs.zero,) * self.rank0
        m1 = tuple(m1) if m1 is not None else (coeffs.zero,) * self.rank1
        if len(m0) != self.rank0 or len(m1) != self.rank1:
            raise TypeMismatch("coordinate lengths do not match the module ranks")
        return NilElement(self, coeffs, m0, m1)

    def zero(self, coeffs):
        return self.element(coeffs)


@dataclass(frozen=True)
class NilElement:
    module: SplitNilModule
    coeffs: object
    m0: tuple
    m1: tuple

    def same_as(self, other) -> bool:
        _check_pair(self, other)
        eq = self.coeffs.eq if hasattr(self.coeffs, "eq") else (lambda a, b: a == b)
        return all(_all(eq(a, b)) for a, b in zip(self.m0 + self.m1, other.m0 + other.m1))

    def is_central_part(self) -> bool:
        return all(_all(self.coeffs.eq(x, self.coeffs.zero)) for x in self.m1)

    def to_dict(self):
        return {"m0": list(self.m0), "m1": list(self.m1)}


def _all(v):
    return bool(np.all(v)) if isinstance(v, np.ndarray) else bool(v)


def _check_pair(x, y):
    if x.module != y.module or x.coeffs != y.coeffs:
        raise TypeMismatch("operands belong to different modules or coefficient structures")


def _zmul(coeffs, n, x):
    """Integer multiple ``n x`` using only the additive structure."""
    if n == 0:
        return coeffs.zero
    if n < 0:
        return coeffs.neg(_zmul(coeffs, -n, x))
    acc = None
    base = x
    while n:
        if n & 1:
            acc = base if acc is None else coeffs.add(acc, base)
        n >>= 1
        if n:
            base = coeffs.add(base, base)
    return acc


def cocycle_value(module, coeffs, x1, y1, mul=None):
    """``c(x1, y1)`` as an ``M0`` coordinate tuple; ``mul`` overrides the product."""
    mul = mul or coeffs.mul
    out = [coeffs.zero] * module.rank0
    for a, b, k, v in module.terms():
        out[k] = coeffs.add(out[k], _zmul(coeffs, v, mul(x1[a], y1[b])))
    return tuple(out)


def nil_add(x: NilElement, y: NilElement) -> NilElement:
    _check_pair(x, y)
    C = x.coeffs
    c = cocycle_value(x.module, C, x.m1, y.m1)
    m0 = tuple(C.add(C.add(a, cc), b) for a, cc, b in zip(x.m0, c, y.m0))
    m1 = tuple(C.add(a, b) for a, b in zip(x.m1, y.m1))
    return NilElement(x.module, C, m0, m1)


def nil_neg(x: NilElement) -> NilElement:
    """Group inverse: ``(-m0 + c(m1, m1), -m1)``."""
    C = x.coeffs
    c = cocycle_value(x.module, C, x.m1, x.m1)
    m0 = tuple(C.add(C.neg(a), cc) for a, cc in zip(x.m0, c))
    return NilElement(x.module, C, m0, tuple(C.neg(a) for a in x.m1))


def nil_sub(x, y):
    return nil_add(x, nil_neg(y))


def nil_scale(x: NilElement, k) -> NilElement:
    """Right action ``(m0, m1)·k = (k^2 m0, k m1)`` with ``k`` in the coefficients."""
    C = x.coeffs
    kk = C.mul(k, k)
    return NilElement(x.module, C, tuple(C.mul(kk, a) for a in x.m0),
                      tuple(C.mul(k, a) for a in x.m1))


def nil_tau(x: NilElement) -> NilElement:
    """``tau(m0, m1) = (2 m0 - c(m1, m1), 0)``."""
    C = x.coeffs
    c = cocycle_value(x.module, C, x.m1, x.m1)
    m0 = tuple(C.add(C.add(a, a), C.neg(cc)) for a, cc in zip(x.m0, c))
    return NilElement(x.module, C, m0, (C.zero,) * x.module.rank1)


def nil_commutator(x: NilElement, y: NilElement) -> NilElement:
    """``[x, y] = x ∔ y ∔ (-x) ∔ (-y)``, computed with the group law."""
    _check_pair(x, y)
    return nil_add(nil_add(nil_add(x, y), nil_neg(x)), nil_neg(y))


def central_scale(z: NilElement, k) -> NilElement:
    """The left module structure on ``M0`` (ordinary scaling of coordinates)."""
    C = z.coeffs
    return NilElement(z.module, C, tuple(C.mul(k, a) for a in z.m0), z.m1)


def nil_bracket(module, coeffs, x1, y1, mul=None):
    """``c(x1, y1) - c(y1, x1)`` with a possibly mixed product ``mul``.

    For the split module this is the ``M0`` part of ``[x, y]``; the mixed
    variant evaluates commutators between points over different coefficient
    structures.
    """
    mul = mul or coeffs.mul
    a = cocycle_value(module, coeffs, x1, y1, mul)
    b = cocycle_value(module, coeffs, y1, x1, lambda p, q: mul(q, p))
    return tuple(coeffs.add(u, coeffs.neg(v)) for u, v in zip(a, b))


# --- exhaustive identity battery over Z/m --------------------------------

@dataclass
class IdentityResult:
    name: str
    instances: int
    counterexample: dict | None = None

    @property
    def ok(self):
        return self.counterexample is None


class _Carrier:
    """All elements of ``M`` over ``Z/m`` encoded as integers 0..m^(r0+r1)-1."""

    def __init__(self, module, ring):
        self.module = module
        self.ring = ring
        self.m = ring.m
        self.width = module.rank0 + module.rank1
        self.size = self.m ** self.width
        self.codes = np.arange(self.size, dtype=np.int64)

    def decode(self, codes):
        codes = np.asarray(codes, dtype=np.int64)
        digits = [(codes // self.m ** i) % self.m for i in range(self.width)]
        r0 = self.module.rank0
        return NilElement(self.module, self.ring, tuple(digits[:r0]), tuple(digits[r0:]))

    def encode(self, x, shape):
        code = np.zeros(shape, dtype=np.int64)
        for i, d in enumerate(x.m0 + x.m1):
            code = code + (np.asarray(d, dtype=np.int64) % self.m) * self.m ** i
        return code

    def element(self, code):
        x = self.decode(np.array(code))
        return NilElement(x.module, x.coeffs, tuple(int(a) for a in x.m0),
                          tuple(int(a) for a in x.m1))


def _first_mismatch(lhs, rhs):
    lhs, rhs = np.broadcast_arrays(lhs, rhs)
    bad = np.argwhere(lhs != rhs)
    return None if len(bad) == 0 else tuple(int(i) for i in bad[0])


def verify_module_identities(module: SplitNilModule, ring) -> list[IdentityResult]:
    """Check every structural identity of a 2-step nilpotent module exhaustively.

    Tables for ``∔``, ``-``, ``·k``, ``tau`` and ``[,]`` are produced by the
    operations above evaluated on the whole carrier; the identities are then
    compared entrywise.  Associativity uses Light's test on a generating set
    (verified to generate by closure), which is exact.
    """
    car = _Carrier(module, ring)
    N, m = car.size, car.m
    ks = np.arange(m, dtype=np.int64)
    col, row = car.codes[:, None], car.codes[None, :]
    X, Y = car.decode(col), car.decode(row)

    ADD = car.encode(nil_add(X, Y), (N, N))
    NEG = car.encode(nil_neg(car.decode(car.codes)), (N,))
    COMM = car.encode(nil_commutator(X, Y), (N, N))
    TAU = car.encode(nil_tau(car.decode(car.codes)), (N,))
    SCALE = car.encode(nil_scale(car.decode(col), ks[None, :]), (N, m))  # [x, k]
    in_m0 = car.codes < m ** module.rank0  # M0 coordinates are the low digits
    m0_codes = car.codes[in_m0]
    KM0 = car.encode(central_scale(car.decode(m0_codes[None, :]), ks[:, None]),
                     (m, len(m0_codes)))  # [k, z]
    km0_index = np.full(N, -1, dtype=np.int64)
    km0_index[m0_codes] = np.arange(len(m0_codes))

    def kscale(k, z):
        return KM0[k, km0_index[z]]

    results = []
    zero = 0

    def record(name, count, lhs, rhs, describe):
        idx = _first_mismatch(lhs, rhs)
        results.append(IdentityResult(name, count, None if idx is None else describe(idx)))

    # group axioms
    record("neutral element", 2 * N, np.stack([ADD[:, zero], ADD[zero, :]]),
           np.stack([car.codes, car.codes]), lambda i: {"x": car.element(i[1]).to_dict()})
    record("inverses", 2 * N, np.stack([ADD[car.codes, NEG], ADD[NEG, car.codes]]), zero,
           lambda i: {"x": car.element(i[1]).to_dict()})

    gens = []
    for i in range(car.width):
        gens.append(m ** i)
    reach = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = int(ADD[x, g])
                if y not in reach:
                    reach.add(y)
                    nxt.append(y)
        frontier = nxt
    generated = len(reach) == N
    results.append(IdentityResult("generating set for associativity test", N * len(gens),
                                  None if generated else {"reached": len(reach), "size": N}))
    for g in gens:
        lhs = ADD[ADD[:, g][:, None], car.codes[None, :]]
        rhs = ADD[car.codes[:, None], ADD[g, :][None, :]]
        record(f"associativity through generator {g}", N * N, lhs, rhs,
               lambda i, g=g: {"x": car.element(i[0]).to_dict(), "a": car.element(g).to_dict(),
                               "y": car.element(i[1]).to_dict()})

    record("commutators lie in M0", N * N, in_m0[COMM], True,
           lambda i: {"x": car.element(i[0]).to_dict(), "y": car.element(i[1]).to_dict()})
    record("M0 is central", N * len(m0_codes), ADD[m0_codes[:, None], car.codes[None, :]],
           ADD[car.codes[None, :], m0_codes[:, None]],
           lambda i: {"z": car.element(m0_codes[i[0]]).to_dict(), "x": car.element(i[1]).to_dict()})

    # monoid action by endomorphisms
    for k in range(m):
        lhs = SCALE[ADD, k]
        rhs = ADD[SCALE[:, k][:, None], SCALE[:, k][None, :]]
        record(f"scaling by {k} is an endomorphism", N * N, lhs, rhs,
               lambda i, k=k: {"x": car.element(i[0]).to_dict(), "y": car.element(i[1]).to_dict(), "k": k})
    kk = (ks[:, None] * ks[None, :]) % m
    record("(m·k)·k' = m·(kk')", N * m * m, SCALE[SCALE[:, :, None], ks[None, None, :]],
           SCALE[car.codes[:, None, None], kk[None, :, :]],
           lambda i: {"x": car.element(i[0]).to_dict(), "k": i[1], "k'": i[2]})
    record("m·1 = m", N, SCALE[:, 1 % m], car.codes, lambda i: {"x": car.element(i[0]).to_dict()})

    # defining identity of tau and its values in M0
    record("tau lands in M0", N, in_m0[TAU], True, lambda i: {"x": car.element(i[0]).to_dict()})
    ksum = (ks[:, None] + ks[None, :]) % m
    lhs = SCALE[car.codes[:, None, None], ksum[None, :, :]]
    mid = kscale(kk[None, :, :], TAU[:, None, None])
    rhs = ADD[ADD[SCALE[:, :, None], mid], SCALE[:, None, :]]
    record("m·(k+k') = m·k ∔ kk'tau(m) ∔ m·k'", N * m * m, lhs, rhs,
           lambda i: {"x": car.element(i[0]).to_dict(), "k": i[1], "k'": i[2]})

    # commutator homogeneity and the M0 scaling rule
    base = COMM
    for k in range(m):
        for k2 in range(m):
            lhs = COMM[SCALE[:, k][:, None], SCALE[:, k2][None, :]]
            rhs = kscale((k * k2) % m, base)
            record(f"[m·{k}, m'·{k2}] = {k * k2 % m}[m, m']", N * N, lhs, rhs,
                   lambda i, k=k, k2=k2: {"x": car.element(i[0]).to_dict(),
                                          "y": car.element(i[1]).to_dict(), "k": k, "k'": k2})
    record("m·k = k^2 m on M0", len(m0_codes) * m, SCALE[m0_codes[:, None], ks[None, :]],
           kscale((ks * ks % m)[None, :], m0_codes[:, None]),
           lambda i: {"z": car.element(m0_codes[i[0]]).to_dict(), "k": i[1]})

    # identities satisfied by tau
    record("tau(m) = 2m on M0", len(m0_codes), TAU[m0_codes], ADD[m0_codes, m0_codes],
           lambda i: {"z": car.element(m0_codes[i[0]]).to_dict()})
    record("tau(m·k) = k^2 tau(m)", N * m, TAU[SCALE], kscale((ks * ks % m)[None, :], TAU[:, None]),
           lambda i: {"x": car.element(i[0]).to_dict(), "k": i[1]})
    record("tau(m ∔ m') = tau(m) + [m, m'] + tau(m')", N * N, TAU[ADD],
           ADD[ADD[TAU[:, None], COMM], TAU[None, :]],
           lambda i: {"x": car.element(i[0]).to_dict(), "y": car.element(i[1]).to_dict()})
    return results


def all_binary_cocycles(rank1, rank0):
    """Every cocycle tensor with entries in {0, 1}."""
    n = rank1 * rank1 * rank0
    for bits in itertools.product((0, 1), repeat=n):
        it = iter(bits)
        yield tuple(tuple(tuple(next(it) for _ in range(rank0)) for _ in range(rank1))
                    for _ in range(rank1))
