"""Homotope towers, formal fractions, the maps between them, and the
presentation maps of the ring cosheaf over a cover ``t_1 .. t_n``.

Everything is levelwise: a homotope element is a value at one level of the
tower ``... -> R^(s^2) -> R^(s) -> R`` and a fraction is ``p / s^n``.  Ring
operations go through :class:`steinlab.rings.Ring`, so values may be numpy
arrays over ``Z/m`` and one call evaluates a law on a whole carrier.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (InvalidShift, LevelMismatch, NotCoprimeToS, NotSupported,
                     ResourceBound, TypeMismatch)
from .nilmod import SplitNilModule, nil_add, nil_bracket, nil_commutator, nil_scale
from .report import Check, VerificationReport
from .rings import HomotopeLevel, Integers, Ring, Zmod
from .snf import QuotientLattice


def _truth(v):
    return v if isinstance(v, np.ndarray) else bool(v)


def _norm(ring, a):
    return ring.normalize(a) if ring.is_finite else a


# --- homotopes --------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HomotopeElement:
    """``value^(s^level)`` in the homotope tower of ``ring`` at ``s``."""

    ring: Ring
    s: object
    level: int
    value: object

    def __post_init__(self):
        if self.level < 0:
            raise InvalidShift("levels are non-negative")
        object.__setattr__(self, "s", _norm(self.ring, self.s))
        object.__setattr__(self, "value", _norm(self.ring, self.value))

    @property
    def coeffs(self):
        return HomotopeLevel(self.ring, self.s, self.level)

    def equals(self, other):
        _check_context(self, other)
        if self.level != other.level:
            raise LevelMismatch("compare homotope elements at one level")
        return _truth(self.ring.eq(self.value, other.value))

    def __repr__(self):
        return f"{self.value}^({self.s}^{self.level})"


def _check_context(a, b):
    if a.ring != b.ring or not np.all(a.ring.eq(a.s, b.s)):
        raise TypeMismatch("operands live over different (ring, s)")


def _check_level(a, b):
    _check_context(a, b)
    if a.level != b.level:
        raise LevelMismatch(f"levels {a.level} and {b.level} differ; shift first")


def homotope_add(a: HomotopeElement, b: HomotopeElement) -> HomotopeElement:
    _check_level(a, b)
    return HomotopeElement(a.ring, a.s, a.level, a.ring.add(a.value, b.value))


def homotope_neg(a: HomotopeElement) -> HomotopeElement:
    return HomotopeElement(a.ring, a.s, a.level, a.ring.neg(a.value))


def homotope_mul(a: HomotopeElement, b: HomotopeElement) -> HomotopeElement:
    """``a^(s^n) b^(s^n) = (a s^n b)^(s^n)``."""
    _check_level(a, b)
    return HomotopeElement(a.ring, a.s, a.level, a.coeffs.mul(a.value, b.value))


def homotope_pow(a: HomotopeElement, k: int) -> HomotopeElement:
    if k < 1:
        raise ValueError("homotopes are not unital; need k >= 1")
    out = a
    for _ in range(k - 1):
        out = homotope_mul(out, a)
    return out


def homotope_act(r, a: HomotopeElement) -> HomotopeElement:
    """Action of the base ring: ``r a^(s^n) = (r a)^(s^n)``."""
    return HomotopeElement(a.ring, a.s, a.level, a.ring.mul(r, a.value))


def homotope_shift(a: HomotopeElement, down_to: int) -> HomotopeElement:
    """Structure map of the tower from ``a.level`` down to ``down_to``."""
    if down_to < 0 or down_to > a.level:
        raise InvalidShift(f"cannot shift level {a.level} to {down_to}")
    f = a.ring.pow(a.s, a.level - down_to)
    return HomotopeElement(a.ring, a.s, down_to, a.ring.mul(f, a.value))


def homotope_delta(a: HomotopeElement):
    """``delta(a^(s^n)) = s^n a`` in the base ring."""
    return a.coeffs.delta(a.value)


# --- formal fractions -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FractionElement:
    """``num / s^level``, compared through the colimit relation."""

    ring: Ring
    s: object
    num: object
    level: int

    def __post_init__(self):
        if self.level < 0:
            raise InvalidShift("levels are non-negative")
        object.__setattr__(self, "s", _norm(self.ring, self.s))
        object.__setattr__(self, "num", _norm(self.ring, self.num))

    def __repr__(self):
        return f"{self.num}/{self.s}^{self.level}"


def fraction_raise(x: FractionElement, to: int) -> FractionElement:
    """Structure map ``p/s^n -> s^(to-n) p / s^to``."""
    if to < x.level:
        raise InvalidShift(f"cannot move level {x.level} down to {to}")
    f = x.ring.pow(x.s, to - x.level)
    return FractionElement(x.ring, x.s, x.ring.mul(f, x.num), to)


def fraction_add(x: FractionElement, y: FractionElement) -> FractionElement:
    _check_context(x, y)
    n = max(x.level, y.level)
    x, y = fraction_raise(x, n), fraction_raise(y, n)
    return FractionElement(x.ring, x.s, x.ring.add(x.num, y.num), n)


def fraction_mul(x: FractionElement, y: FractionElement) -> FractionElement:
    _check_context(x, y)
    return FractionElement(x.ring, x.s, x.ring.mul(x.num, y.num), x.level + y.level)


@lru_cache(maxsize=None)
def stabilization_index(ring: Ring, s) -> int:
    """Least ``k`` with ``s^k R = s^(k+1) R``; annihilators of ``s^j`` are stable from there on."""
    elems = ring.elements()
    k, power = 0, ring.one
    prev = len({ring.mul(power, a) for a in elems})
    while True:
        power = ring.mul(power, s)
        size = len({ring.mul(power, a) for a in elems})
        if size == prev:
            return k
        k, prev = k + 1, size


def fraction_equal(x: FractionElement, y: FractionElement):
    """``p/s^n == q/s^m`` iff ``s^(m+j) p = s^(n+j) q`` for some ``j >= 0``."""
    _check_context(x, y)
    R = x.ring
    d = R.sub(R.mul(R.pow(x.s, y.level), x.num), R.mul(R.pow(x.s, x.level), y.num))
    if R.is_finite and isinstance(x.s, np.ndarray):
        # a strictly shrinking chain s^j R has at most log2 |R| steps
        j = R.size.bit_length()
    elif R.is_finite:
        j = stabilization_index(R, x.s)
    elif x.s == 0:
        # every level maps to the zero ring after one step
        return _truth(R.eq(d, 0)) if x.level == y.level == 0 else True
    else:
        # Z is a domain: a nonzero power of s kills nothing
        j = 0
    return _truth(R.is_zero(R.mul(R.pow(x.s, j), d)))


def fraction_act(p: FractionElement, a: HomotopeElement) -> HomotopeElement:
    """``(p / s^n) a^(s^m) = (p a)^(s^(m-n))``; needs ``m >= n``."""
    _check_context(p, a)
    if a.level < p.level:
        raise LevelMismatch(f"fraction level {p.level} exceeds homotope level {a.level}")
    return HomotopeElement(a.ring, a.s, a.level - p.level, a.ring.mul(p.num, a.value))


def delta_fraction(a: HomotopeElement) -> FractionElement:
    """The composite ``R^(s^inf) -> R -> R_s``."""
    return FractionElement(a.ring, a.s, homotope_delta(a), 0)


# --- localization oracle ----------------------------------------------------

@dataclass(frozen=True)
class Localization:
    """``R_s`` realized as ``eR`` for the idempotent ``e`` generating ``s^k R``."""

    ring: Ring
    s: object
    k: int
    e: object
    carrier: tuple

    @property
    def size(self):
        return len(self.carrier)

    def s_inverse(self):
        es = self.ring.mul(self.e, self.s)
        for x in self.carrier:
            if self.ring.eq(self.ring.mul(es, x), self.e):
                return x
        raise AssertionError("s is not invertible in eR")

    def image(self, x: FractionElement):
        """Image of ``x`` in ``eR``; numpy arrays of numerators are accepted."""
        R = self.ring
        inv = R.pow(self.s_inverse(), x.level) if x.level else self.e
        return R.mul(R.mul(self.e, x.num), inv)


def localize_finite_ring(ring: Ring, s) -> Localization:
    s = ring.normalize(s)
    elems = ring.elements()
    ideal = lambda g: frozenset(ring.mul(g, a) for a in elems)
    # independent of fraction_equal: search k with s^k R = s^2k R directly
    k = 1
    while ideal(ring.pow(s, k)) != ideal(ring.pow(s, 2 * k)):
        k += 1
    sk = ring.pow(s, k)
    carrier = tuple(sorted(ideal(sk)))
    e = next(x for x in carrier if ring.eq(ring.mul(x, sk), sk))
    return Localization(ring, s, k, e, carrier)


# --- functoriality in s -----------------------------------------------------

def t_pullback(t, a: HomotopeElement, s) -> HomotopeElement:
    """``t*(a^((ts)^n)) = (t^n a)^(s^n)``; ``a`` must live over ``t s``."""
    R = a.ring
    if not np.all(R.eq(R.mul(t, s), a.s)):
        raise TypeMismatch(f"context parameter {a.s} is not {t}*{s}")
    return HomotopeElement(R, s, a.level, R.mul(R.pow(t, a.level), a.value))


def t_pushforward(t, x: FractionElement) -> FractionElement:
    """``t_*(p/s^n) = t^n p / (ts)^n``."""
    R = x.ring
    return FractionElement(R, R.mul(t, x.s), R.mul(R.pow(t, x.level), x.num), x.level)


class PowerIso:
    """The maps ``(s^(k-1))*`` / ``(s^(k-1))_*`` and their inverses.

    ``forward`` sends homotopes over ``s^k`` to homotopes over ``s`` and
    fractions over ``s`` to fractions over ``s^k``; ``inverse`` goes back with
    the value unchanged, which needs homotope levels divisible by ``k``.
    """

    def __init__(self, ring: Ring, s, k: int, direction: str = "forward"):
        if k < 1:
            raise ValueError("k must be positive")
        if direction not in ("forward", "inverse"):
            raise ValueError(f"unknown direction {direction!r}")
        self.ring, self.s, self.k, self.direction = ring, _norm(ring, s), k, direction
        self.sk = ring.pow(self.s, k)

    def __call__(self, x):
        R, k = self.ring, self.k
        if isinstance(x, HomotopeElement):
            if self.direction == "forward":
                return t_pullback(R.pow(self.s, k - 1), x, self.s)
            if not np.all(R.eq(x.s, self.s)):
                raise TypeMismatch("inverse expects a homotope over s")
            if x.level % k:
                raise LevelMismatch(f"level {x.level} is not divisible by {k}")
            return HomotopeElement(R, self.sk, x.level // k, x.value)
        if isinstance(x, FractionElement):
            if self.direction == "forward":
                if not np.all(R.eq(x.s, self.s)):
                    raise TypeMismatch("forward expects a fraction over s")
                return t_pushforward(R.pow(self.s, k - 1), x)
            if not np.all(R.eq(x.s, self.sk)):
                raise TypeMismatch("inverse expects a fraction over s^k")
            return FractionElement(R, self.s, x.num, x.level * k)
        raise TypeMismatch(f"cannot apply a power isomorphism to {type(x).__name__}")


def power_iso(k: int, direction: str, s, ring: Ring | None = None) -> PowerIso:
    return PowerIso(ring or Integers(), s, k, direction)


# --- Bezout certificates ----------------------------------------------------

@dataclass(frozen=True)
class BezoutCertificate:
    N: int
    coeffs: tuple
    m: int

    def to_dict(self):
        return {"N": self.N, "coeffs": list(self.coeffs), "m": self.m}


def _ext_gcd_many(values):
    """``(g, coeffs)`` with ``sum coeffs_i values_i = g = gcd(values)``."""
    g, coeffs = 0, [0] * len(values)
    for i, v in enumerate(values):
        # combine g = sum coeffs * values with v
        old_r, r = g, v
        old_x, x = 1, 0
        old_y, y = 0, 1
        while r:
            q = old_r // r
            old_r, r = r, old_r - q * r
            old_x, x = x, old_x - q * x
            old_y, y = y, old_y - q * y
        if old_r < 0:
            old_r, old_x, old_y = -old_r, -old_x, -old_y
        coeffs = [c * old_x for c in coeffs]
        coeffs[i] = old_y
        g = old_r
    return g, coeffs


def bezout_certificate(t, s, m: int, ring: Ring | None = None, bound: int = 64):
    """Find ``N`` and ``a_i`` with ``sum a_i t_i^m = s^N``, ``N`` as small as possible."""
    ring = ring or Integers()
    if not isinstance(ring, (Integers, Zmod)):
        raise NotSupported("Bezout certificates are implemented for Z and Z/m")
    powers = [int(ti) ** m for ti in t]
    modulus = ring.m if isinstance(ring, Zmod) else 0
    g, coeffs = _ext_gcd_many(powers + ([modulus] if modulus else []))
    coeffs = coeffs[: len(powers)]
    for N in range(bound + 1):
        target = int(s) ** N
        if g == 0 and target != 0 or g and target % g:
            continue
        scale = target // g if g else 0
        a = tuple(ring.from_int(c * scale) for c in coeffs)
        lhs = ring.sum(ring.mul(ai, ring.pow(ring.from_int(ti), m)) for ai, ti in zip(a, t))
        assert ring.eq(lhs, ring.pow(ring.from_int(s), N)), "Bezout identity failed"
        return BezoutCertificate(N, a, m)
    raise NotCoprimeToS(f"no certificate with N <= {bound} for t={list(t)}, s={s}, m={m}")


# --- the cosheaf presentation -----------------------------------------------

class CosheafGroup:
    """``L_m = (sum_i R tau_i) / (tau_i(t_j^m p) - tau_j(t_i^m p))``.

    Generators are ``tau_i(b)`` for ``b`` in an additive basis of ``R``; the
    relation matrix also carries the additive orders.  Equality is decided by
    Smith normal form coordinates.
    """

    def __init__(self, ring: Ring, s, t, m: int):
        self.ring, self.s, self.t, self.m = ring, _norm(ring, s), tuple(t), m
        self.basis = ring.additive_gens()
        self.orders = ring.additive_orders()
        self.d = len(self.basis)
        self.n = len(self.t)
        self.tm = [ring.pow(ti, m) for ti in self.t]
        rows = []
        for i in range(self.n):
            for b, order in enumerate(self.orders):
                row = [0] * (self.n * self.d)
                row[i * self.d + b] = order
                rows.append(row)
        for i, j in itertools.combinations(range(self.n), 2):
            for b in self.basis:
                rows.append(self._diff(self.tau(i, ring.mul(self.tm[j], b)),
                                       self.tau(j, ring.mul(self.tm[i], b))))
        self.relations = rows
        self.lattice = QuotientLattice(rows, self.n * self.d)

    def tau(self, i, p):
        vec = [0] * (self.n * self.d)
        vec[i * self.d:(i + 1) * self.d] = self.ring.coords(p)
        return vec

    @staticmethod
    def _diff(u, v):
        return [a - b for a, b in zip(u, v)]

    def add(self, u, v):
        return [a + b for a, b in zip(u, v)]

    def equal(self, u, v):
        return self.lattice.equal(u, v)

    @property
    def order(self):
        return self.lattice.order

    def c(self, vec):
        """``c_m(tau_i(p)) = t_i^m p``, extended additively."""
        R = self.ring
        out = R.zero
        for i in range(self.n):
            for b in range(self.d):
                coef = vec[i * self.d + b]
                if coef:
                    term = R.mul(R.from_int(coef), R.mul(self.tm[i], self.basis[b]))
                    out = R.add(out, term)
        return out

    def d_map(self, cert: BezoutCertificate, p):
        """``d_m(p) = sum_i tau_i(a_i p)`` for ``p`` at level ``m + N``."""
        out = [0] * (self.n * self.d)
        for i, a in enumerate(cert.coeffs):
            out = self.add(out, self.tau(i, self.ring.mul(a, p)))
        return out

    def elements(self):
        """Canonical coordinates of every element (finite quotients only)."""
        ranges = [range(d) for d in self.lattice.moduli]
        return itertools.product(*ranges)


def _default_payload():
    # rank1 = 2, rank0 = 1, c(x, y) = x_1 y_2
    return SplitNilModule(2, 1, (((0,), (1,)), ((0,), (0,))))


def _wm_pullback(t, x, s, level):
    """``t*`` applied coordinatewise to a point of ``W(M)`` over ``R^((ts)^level)``."""
    R = x.coeffs.ring
    f = R.pow(t, level)
    C = HomotopeLevel(R, s, level)
    return x.module.element(C, [R.mul(f, a) for a in x.m0], [R.mul(f, a) for a in x.m1])


def cosheaf_presentation_check(ring: Ring, s, t, m: int, module: SplitNilModule | None = None,
                               bound: int = 4096, samples: int = 200, seed: int = 0) -> VerificationReport:
    """Build ``L_m``, ``c_m`` and ``d_m`` and verify the composite identities exactly."""
    if not ring.is_finite:
        raise NotSupported("the presentation check needs a finite ring")
    if ring.size > bound:
        raise ResourceBound(f"carrier of size {ring.size} exceeds bound {bound}")
    R = ring
    s = R.normalize(s)
    t = tuple(R.normalize(ti) for ti in t)
    cert = bezout_certificate(t, s, m, R)
    N = cert.N
    sN = R.pow(s, N)
    L = CosheafGroup(R, s, t, m)
    L_hi = CosheafGroup(R, s, t, m + N)
    cert_hi = bezout_certificate(t, s, m + N, R)
    elems = R.elements()
    report = VerificationReport("cosheaf", {"ring": R.to_dict(), "s": s, "t": list(t), "m": m})
    report.data = {"N": N, "coeffs": list(cert.coeffs), "L_order": L.order,
                   "L_invariants": L.lattice.invariants}

    bad = [{"relation": r} for r in L.relations if not R.is_zero(L.c(r))]
    report.add(Check.from_failures("c_kills_relations", len(L.relations), bad))

    bad = []
    for p in elems:
        lhs = L.c(L.d_map(cert, p))
        if not R.eq(lhs, R.mul(sN, p)):
            bad.append({"p": p, "lhs": lhs, "expected": R.mul(sN, p)})
    report.add(Check.from_failures("c_after_d_is_s^N", len(elems), bad))

    bad = []
    for i, ti in enumerate(t):
        rhs_scale = R.mul(R.pow(ti, N), sN)
        for p in elems:
            lhs = L.d_map(cert, L_hi.c(L_hi.tau(i, p)))
            rhs = L.tau(i, R.mul(rhs_scale, p))
            if not L.equal(lhs, rhs):
                bad.append({"i": i, "p": p})
    report.add(Check.from_failures("d_after_c_is_structure_map", len(t) * len(elems), bad))

    # c_m is well defined on canonical classes, and injective when the cover is trivial
    if len(t) == 1 and R.is_unit(t[0]):
        classes = {}
        for p in elems:
            classes.setdefault(L.lattice.canonical(L.tau(0, p)), set()).add(L.c(L.tau(0, p)))
        values = [v for vs in classes.values() for v in vs]
        bad = []
        if any(len(v) != 1 for v in classes.values()) or len(set(values)) != len(values):
            bad.append({"classes": len(classes), "values": len(set(values))})
        if L.order != R.size:
            bad.append({"L_order": L.order, "ring_size": R.size})
        report.add(Check.from_failures("single_cover_bijective", len(elems), bad))

    # W(M)-coefficients: additivity of t_i* and the commutator relation
    M = module or _default_payload()
    rng = random.Random(seed)
    bad, count = [], 0
    for i, ti in enumerate(t):
        C_i = HomotopeLevel(R, R.mul(ti, s), m)
        for _ in range(samples):
            x = M.element(C_i, [rng.choice(elems) for _ in range(M.rank0)],
                          [rng.choice(elems) for _ in range(M.rank1)])
            y = M.element(C_i, [rng.choice(elems) for _ in range(M.rank0)],
                          [rng.choice(elems) for _ in range(M.rank1)])
            lhs = _wm_pullback(ti, nil_add(x, y), s, m)
            rhs = nil_add(_wm_pullback(ti, x, s, m), _wm_pullback(ti, y, s, m))
            count += 1
            if not lhs.same_as(rhs):
                bad.append({"i": i, "x": x.to_dict(), "y": y.to_dict()})
    report.add(Check.from_failures("wm_pullback_additive", count, bad))

    bad, count = [], 0
    for i, j in itertools.permutations(range(len(t)), 2):
        ti, tj = t[i], t[j]
        C_i = HomotopeLevel(R, R.mul(ti, s), m)
        C_j = HomotopeLevel(R, R.mul(tj, s), m)
        C_ij = HomotopeLevel(R, R.mul(R.mul(ti, tj), s), m)
        sm = R.pow(s, m)
        mixed = (lambda a, b: R.mul(R.mul(sm, a), b))
        for a, b in itertools.product(range(M.rank1), repeat=2):
            for p, q in itertools.product(elems, repeat=2):
                x1 = [R.zero] * M.rank1
                y1 = [R.zero] * M.rank1
                x1[a] = p
                y1[b] = q
                x = M.element(C_i, None, x1)
                y = M.element(C_j, None, y1)
                lhs = nil_commutator(_wm_pullback(ti, x, s, m), _wm_pullback(tj, y, s, m))
                br = M.element(C_ij, nil_bracket(M, C_ij, x1, y1, mixed))
                rhs = _wm_pullback(R.mul(ti, tj), br, s, m)
                count += 1
                if not lhs.same_as(rhs):
                    bad.append({"i": i, "j": j, "x1": x1, "y1": y1})
    report.add(Check.from_failures("wm_commutator_relation", count, bad))
    return report


# --- truncated power maps ---------------------------------------------------

def power_idem_level_map(ring: Ring, n: int, k: int, x, y, a):
    """Level map ``(x, y, a) -> (a^k x, a^(2k) y)``.

    ``x`` (the ``M/M0`` part) lands at level ``(k+1) n`` and ``y`` (the
    ``M0`` part) at level ``(2k+1) n``.  Returns the two coordinate tuples
    and the two target levels.
    """
    ak = ring.pow(a, k) if not isinstance(a, np.ndarray) else (a ** k) % ring.m
    a2k = ring.mul(ak, ak)
    return (tuple(ring.mul(ak, v) for v in x), tuple(ring.mul(a2k, v) for v in y),
            (k + 1) * n, (2 * k + 1) * n)


def check_power_idem(ring: Zmod, s, module: SplitNilModule, k: int, n: int) -> list[Check]:
    """Exhaustive surjectivity and compatibility of the truncated level map."""
    m = ring.m
    r1, r0 = module.rank1, module.rank0
    width = r1 + r0 + 1
    codes = np.arange(m ** width, dtype=np.int64)
    digits = [(codes // m ** i) % m for i in range(width)]
    x, y, a = digits[:r1], digits[r1:r1 + r0], digits[-1]
    x_img, y_img, lvl1, lvl0 = power_idem_level_map(ring, n, k, x, y, a)

    target = np.zeros_like(codes)
    for i, v in enumerate(tuple(x_img) + tuple(y_img)):
        target = target + (np.asarray(v) % m) * m ** i
    hit = np.unique(target).size
    expected = m ** (r1 + r0)
    checks = [Check.from_failures("surjective", int(codes.size),
                                  [] if hit == expected else [{"image": int(hit), "target": expected}])]

    # shifting the image back to level n agrees with the homotope scaling there
    C = HomotopeLevel(ring, s, n)
    ak = a
    for _ in range(k - 1):
        ak = C.mul(ak, a)
    pt = module.element(C, y, x)
    scaled = nil_scale(pt, ak)
    f1 = ring.pow(ring.normalize(s), lvl1 - n)
    f0 = ring.pow(ring.normalize(s), lvl0 - n)
    bad = []
    for got, want in zip(scaled.m1, x_img):
        if not np.all(ring.eq(got, ring.mul(f1, want))):
            bad.append({"component": "m1"})
    for got, want in zip(scaled.m0, y_img):
        if not np.all(ring.eq(got, ring.mul(f0, want))):
            bad.append({"component": "m0"})
    checks.append(Check.from_failures("compatible_with_structure_maps", int(codes.size), bad))
    return checks


# --- exhaustive law sweep over Z/m ------------------------------------------

def _grid(m, k):
    """``k`` broadcastable axes each running over ``0..m-1``."""
    out = []
    for i in range(k):
        shape = [1] * k
        shape[i] = m
        out.append(np.arange(m, dtype=np.int64).reshape(shape))
    return out


def check_tower_laws(ring: Zmod, s, max_level: int = 2) -> list[Check]:
    """Every homotope, fraction, ``t*``/``t_*`` and power-isomorphism law on ``Z/m``
    at one ``s``, evaluated on the whole carrier at once."""
    R, m = ring, ring.m
    s = R.normalize(s)
    checks = {}

    def record(name, ok, count, where):
        ok = np.broadcast_to(np.asarray(ok), np.broadcast_shapes(np.shape(ok), ()))
        entry = checks.setdefault(name, [0, []])
        entry[0] += count
        if not np.all(ok) and not entry[1]:
            idx = tuple(int(i) for i in np.argwhere(~ok)[0]) if np.ndim(ok) else ()
            entry[1].append({"s": int(s), **where, "index": list(idx)})

    A, B, C = _grid(m, 3)
    H = lambda n, v, base=s: HomotopeElement(R, base, n, v)
    F = lambda n, v, base=s: FractionElement(R, base, v, n)
    cube = m ** 3
    for n in range(max_level + 1):
        a, b, c = H(n, A), H(n, B), H(n, C)
        where = {"level": n}
        record("associative", homotope_mul(homotope_mul(a, b), c).equals(homotope_mul(a, homotope_mul(b, c))), cube, where)
        record("distributive", homotope_mul(a, homotope_add(b, c)).equals(
            homotope_add(homotope_mul(a, b), homotope_mul(a, c))), cube, where)
        record("commutative", homotope_mul(a, b).equals(homotope_mul(b, a)), m * m, where)
        # A acts as r, B and C as homotope elements
        record("action_compatible", homotope_act(A, homotope_mul(b, c)).equals(
            homotope_mul(homotope_act(A, b), c)), cube, where)
        record("delta_multiplicative", R.eq(homotope_delta(homotope_mul(a, b)),
                                            R.mul(homotope_delta(a), homotope_delta(b))), m * m, where)
        record("delta_linear", R.eq(homotope_delta(homotope_act(A, b)), R.mul(A, homotope_delta(b))), m * m, where)
        # crossed module: delta(a) b = a b = a delta(b) (the latter as the ring action)
        record("delta_peiffer", homotope_act(homotope_delta(a), b).equals(homotope_mul(a, b)), m * m, where)
        for lo in range(n):
            record("shift_multiplicative", homotope_shift(homotope_mul(a, b), lo).equals(
                homotope_mul(homotope_shift(a, lo), homotope_shift(b, lo))), m * m, {**where, "to": lo})
            record("shift_preserves_delta", R.eq(homotope_delta(homotope_shift(a, lo)), homotope_delta(a)), m, where)
            for mid in range(lo, n + 1):
                record("shift_composes", homotope_shift(homotope_shift(a, mid), lo).equals(
                    homotope_shift(a, lo)), m, {**where, "via": mid, "to": lo})

        # t-maps: A plays a, B plays t, C plays u
        t, u = B, C
        ts = R.mul(t, s)
        a_ts = H(n, A, ts)
        once = t_pullback(R.mul(t, u), HomotopeElement(R, R.mul(R.mul(t, u), s), n, A), s)
        twice = t_pullback(u, t_pullback(t, HomotopeElement(R, R.mul(R.mul(t, u), s), n, A), R.mul(u, s)), s)
        record("pullback_composes", once.equals(twice), cube, where)
        record("pullback_unit", t_pullback(1, H(n, A), s).equals(H(n, A)), m, where)
        pa = F(n, A)
        record("pushforward_composes", R.eq(t_pushforward(R.mul(t, u), pa).num,
                                            t_pushforward(t, t_pushforward(u, pa)).num), cube, where)
        record("pushforward_unit", fraction_equal(t_pushforward(1, pa), pa), m, where)
        record("pullback_multiplicative", t_pullback(t, homotope_mul(a_ts, H(n, C, ts)), s).equals(
            homotope_mul(t_pullback(t, a_ts, s), t_pullback(t, H(n, C, ts), s))), cube, where)
        pushed = t_pushforward(t, delta_fraction(t_pullback(t, a_ts, s)))
        record("push_delta_pull", fraction_equal(pushed, delta_fraction(a_ts)), m * m, where)
        for j in range(n + 1):
            p = F(j, C)
            lhs = fraction_act(p, t_pullback(t, a_ts, s))
            rhs = t_pullback(t, fraction_act(t_pushforward(t, p), a_ts), s)
            record("action_through_pullback", lhs.equals(rhs), cube, {**where, "fraction_level": j})
        # t* and t'* agree after one structure map when ts = t's
        same = R.eq(R.mul(B, s), R.mul(C, s))
        if n >= 1:
            src = H(n, A, ts)
            lhs = t_pullback(B, homotope_shift(src, n - 1), s)
            rhs = t_pullback(C, homotope_shift(HomotopeElement(R, R.mul(C, s), n, A), n - 1), s)
            record("pullback_depends_on_ts", np.where(same, lhs.equals(rhs), True), cube, where)
        record("pushforward_depends_on_ts", np.where(
            same, fraction_equal(t_pushforward(B, pa), FractionElement(R, R.mul(B, s), t_pushforward(C, pa).num, n)), True),
            cube, where)

        # power isomorphisms: round trips are structure maps
        for k in (1, 2, 3):
            fwd, inv = PowerIso(R, s, k, "forward"), PowerIso(R, s, k, "inverse")
            top = H(k * n, A)
            record("power_iso_roundtrip_homotope", fwd(inv(top)).equals(homotope_shift(top, n)), m, {**where, "k": k})
            over_sk = HomotopeElement(R, R.pow(s, k), k * n, A)
            back = inv(fwd(over_sk))
            record("power_iso_roundtrip_homotope_sk", back.equals(homotope_shift(over_sk, n)), m, {**where, "k": k})
            record("power_iso_roundtrip_fraction", fraction_equal(inv(fwd(pa)), pa), m, {**where, "k": k})

    # colimit equality against the eR oracle
    loc = localize_finite_ring(R, s)
    P, Q = _grid(m, 2)
    for n in range(max_level + 2):
        for k in range(max_level + 2):
            x, y = F(n, P), F(k, Q)
            oracle = R.eq(loc.image(x), loc.image(y))
            record("fraction_equal_matches_localization", np.equal(fraction_equal(x, y), oracle),
                   m * m, {"levels": [n, k]})
    return [Check.from_failures(name, count, bad) for name, (count, bad) in checks.items()]
