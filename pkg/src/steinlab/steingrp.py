"""Steinberg groups of concrete pinnings: words, relations, collection,
Weyl triples and evaluation into matrix groups.

Two matrix families are supported: split ``SL_n`` (roots ``e_i - e_j``,
``P_alpha = R``) and block ``GL_{kd}`` with relative roots ``e_i - e_j`` and
``P_alpha = Mat_d(R)``.  ``SL_n`` is the block family with ``d = 1`` and a
determinant-one torus.  Type BC is symbolic only.

Letters may carry values in the base ring or in a homotope level
``R^(s^n)``; the latter evaluate to congruence points ``I + M`` stored by
their deviation ``M`` with the product ``M + N + M s^n N``.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from dataclasses import dataclass, field

import numpy as np

from .errors import (AntiParallel, NoWitness, NotAPreimage, NotInvertible,
                     NotSupported, NotUnipotent, PinningBroken, RankTooSmall,
                     ResourceBound, TypeMismatch)
from .matrices import MatrixAlgebra
from .report import Check, VerificationReport
from .rings import HomotopeLevel, Ring, make_ring
from .rootsys import (RootSubset, build_root_system, classify_subset, neighbors,
                      reflect)


def _base_ring(coeffs):
    return coeffs.ring if isinstance(coeffs, HomotopeLevel) else coeffs


def _factor(coeffs):
    return coeffs.factor if isinstance(coeffs, HomotopeLevel) else None


# --- values of P_alpha --------------------------------------------------------

class ValueSpace:
    """``P_alpha`` over a coefficient structure: scalars when ``d = 1``,
    otherwise ``d x d`` blocks stored as tuples of tuples."""

    def __init__(self, coeffs, d: int = 1):
        self.C = coeffs
        self.ring = _base_ring(coeffs)
        self.d = d
        z = self.ring.zero
        self.zero = z if d == 1 else tuple((z,) * d for _ in range(d))

    def normalize(self, x):
        R = self.ring
        if self.d == 1:
            return R.normalize(x) if R.is_finite else x
        if R.is_finite:
            return tuple(tuple(R.normalize(v) for v in row) for row in x)
        return tuple(tuple(row) for row in x)

    def rows(self, x):
        return [[x]] if self.d == 1 else [list(r) for r in x]

    def from_rows(self, rows):
        return self.normalize(rows[0][0] if self.d == 1 else rows)

    def add(self, x, y):
        if self.d == 1:
            return self.C.add(x, y)
        return tuple(tuple(self.C.add(a, b) for a, b in zip(r, s)) for r, s in zip(x, y))

    def neg(self, x):
        if self.d == 1:
            return self.C.neg(x)
        return tuple(tuple(self.C.neg(a) for a in r) for r in x)

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def mul(self, x, y, op=None):
        """Product in ``P``; ``op`` overrides the entry product (mixed levels)."""
        op = op or self.C.mul
        if self.d == 1:
            return op(x, y)
        d = self.d
        return tuple(tuple(self.ring.sum(op(x[i][k], y[k][j]) for k in range(d)) for j in range(d))
                     for i in range(d))

    def plain_mul(self, x, y):
        return self.mul(x, y, self.ring.mul)

    def scale(self, k, x):
        """Right action of a base-ring scalar: ``x . k = k x``."""
        if self.d == 1:
            return self.ring.mul(k, x)
        return tuple(tuple(self.ring.mul(k, a) for a in r) for r in x)

    def eq(self, x, y):
        return self.normalize(x) == self.normalize(y)

    def is_zero(self, x):
        return self.eq(x, self.zero)

    def elements(self):
        elems = self.ring.elements()
        if self.d == 1:
            return list(elems)
        return [tuple(tuple(c[i * self.d:(i + 1) * self.d]) for i in range(self.d))
                for c in itertools.product(elems, repeat=self.d * self.d)]

    def one(self):
        one = self.ring.one
        return one if self.d == 1 else tuple(
            tuple(one if i == j else self.ring.zero for j in range(self.d)) for i in range(self.d))

    # ring-level invertibility ("invertible" in the Weyl-triple sense for type A)
    def det(self, x):
        if self.d == 1:
            return x
        return MatrixAlgebra(self.ring, self.d).det(np.array(self.rows(x), dtype=object))

    def is_invertible(self, x):
        return self.ring.is_unit(self.det(x))

    def inverse(self, x):
        if self.d == 1:
            return self.ring.inverse(x)
        alg = MatrixAlgebra(self.ring, self.d)
        inv = alg.inverse(alg.array(self.rows(x)))
        return self.from_rows(inv.tolist())

    def to_json(self, x):
        return x if self.d == 1 else [list(r) for r in x]


# --- pinnings ------------------------------------------------------------------

@dataclass
class Pinning:
    """A type-A root grading of ``SL_n`` (``d = 1``) or block ``GL_{kd}``.

    ``signs[(alpha, beta)]`` is the sign in
    ``[x_alpha(p), x_beta(q)] = x_{alpha+beta}(sign * product)`` where the
    product is ``p q`` when ``alpha = (i, j)``, ``beta = (j, k)`` and ``q p``
    when ``alpha = (i, j)``, ``beta = (k, i)``.
    """

    kind: str
    ring: Ring
    k: int
    d: int
    signs: dict = field(default_factory=dict)

    def __post_init__(self):
        self.phi = build_root_system("A", self.k - 1)
        self.size = self.k * self.d
        self.order = tuple(sorted(self.phi.roots))
        self.position = {r: i for i, r in enumerate(self.order)}
        self._pairs = {}
        for r in self.phi.roots:
            i = r.index(1)
            j = r.index(-1)
            self._pairs[r] = (i, j)
        self._roots = {v: r for r, v in self._pairs.items()}
        if not self.signs:
            for a, b in itertools.permutations(self.phi.roots, 2):
                (i, j), (k, l) = self._pairs[a], self._pairs[b]
                if j == k and i != l:
                    self.signs[(a, b)] = 1
                elif l == i and j != k:
                    self.signs[(a, b)] = -1

    @property
    def name(self):
        if self.kind == "sl":
            return f"SL{self.k}({self.ring})"
        return f"GL({self.k}x{self.d}, {self.ring})"

    def to_dict(self):
        out = {"kind": self.kind, "ring": self.ring.to_dict()}
        if self.kind == "sl":
            out["n"] = self.k
        else:
            out.update(k=self.k, d=self.d)
        flips = self.sign_flips()
        if flips:
            out["sign_flips"] = [[list(a), list(b)] for a, b in flips]
        return out

    def sign_flips(self):
        """Root pairs whose sign differs from the standard pinning."""
        standard = Pinning(self.kind, self.ring, self.k, self.d).signs
        return sorted(k for k, v in self.signs.items() if standard.get(k) != v)

    def pair(self, root):
        return self._pairs[tuple(root)]

    def root(self, i, j):
        return self._roots[(i, j)]

    def values(self, coeffs=None) -> ValueSpace:
        return ValueSpace(coeffs if coeffs is not None else self.ring, self.d)

    def levi_blocks(self):
        return self.k

    def with_sign_flipped(self, alpha, beta):
        """Copy of the pinning with one structure-map sign reversed (mutation fixture)."""
        signs = dict(self.signs)
        key = (tuple(alpha), tuple(beta))
        if key not in signs:
            raise ValueError("no structure map for this pair")
        signs[key] = -signs[key]
        return Pinning(self.kind, self.ring, self.k, self.d, signs)

    # structure maps f_{alpha beta}^{alpha + beta}
    def f_terms(self, alpha, beta, p, q, coeffs=None, op=None):
        """``[x_alpha(p), x_beta(q)]`` as ``[(gamma, value), ...]`` in the fixed order."""
        alpha, beta = tuple(alpha), tuple(beta)
        if alpha == tuple(-x for x in beta):
            raise AntiParallel(f"{alpha} and {beta} are anti-parallel")
        sign = self.signs.get((alpha, beta))
        if sign is None:
            return []
        V = self.values(coeffs)
        (i, j), (k, l) = self.pair(alpha), self.pair(beta)
        prod = V.mul(p, q, op) if j == k else V.mul(q, p, op)
        gamma = tuple(a + b for a, b in zip(alpha, beta))
        return [(gamma, prod if sign == 1 else V.neg(prod))]

    def solve_f(self, alpha, beta, e, target):
        """``q`` with ``f_{alpha beta}(e, q) = target`` for invertible ring-level ``e``."""
        V = self.values()
        sign = self.signs[(tuple(alpha), tuple(beta))]
        (i, j), (k, l) = self.pair(alpha), self.pair(beta)
        t = target if sign == 1 else V.neg(target)
        inv = V.inverse(e)
        return V.plain_mul(inv, t) if j == k else V.plain_mul(t, inv)

    # evaluation data
    def place(self, root, value, coeffs=None):
        """Deviation matrix ``t_alpha(p) - I`` as a ring-level array."""
        V = self.values(coeffs)
        alg = MatrixAlgebra(self.ring, self.size)
        M = alg.zeros()
        i, j = self.pair(root)
        d = self.d
        M[i * d:(i + 1) * d, j * d:(j + 1) * d] = np.array(V.rows(value), dtype=alg.dtype)
        return alg.reduce(M)

    def block(self, M, root):
        i, j = self.pair(root)
        d = self.d
        sub = M[i * d:(i + 1) * d, j * d:(j + 1) * d]
        return self.values().from_rows(sub.tolist())

    def t(self, root, value):
        alg = MatrixAlgebra(self.ring, self.size)
        return alg.add(alg.identity(), self.place(root, value))

    def algebra(self):
        return MatrixAlgebra(self.ring, self.size)

    def levi_elements(self):
        """All block-diagonal elements of the torus centralizer (finite rings)."""
        V = self.values()
        inv = [x for x in V.elements() if V.is_invertible(x)]
        alg = self.algebra()
        out = []
        for blocks in itertools.product(inv, repeat=self.k):
            M = alg.zeros()
            for b, x in enumerate(blocks):
                M[b * self.d:(b + 1) * self.d, b * self.d:(b + 1) * self.d] = np.array(V.rows(x))
            if self.kind == "sl" and not self.ring.eq(alg.det(M), self.ring.one):
                continue
            out.append(alg.reduce(M))
        return out


def make_split_pinning_sl(n: int, ring, allow_small: bool = False) -> Pinning:
    ring = make_ring(ring)
    if n < 3 and not (allow_small and n == 2):
        raise RankTooSmall(f"need n >= 3, got {n}")
    return Pinning("sl", ring, n, 1)


def make_block_pinning_gl(k: int, d: int, ring) -> Pinning:
    ring = make_ring(ring)
    if k < 3:
        raise RankTooSmall(f"need k >= 3 blocks, got {k}")
    if d < 1:
        raise ValueError("block size must be positive")
    return Pinning("gl_block", ring, k, d)


def make_pinning(spec) -> Pinning:
    """From a config mapping ``{kind, n | k, d, ring}``."""
    kind = spec.get("kind")
    ring = make_ring(spec.get("ring", "Zmod:2"))
    if kind == "sl":
        return make_split_pinning_sl(int(spec["n"]), ring)
    if kind == "gl_block":
        return make_block_pinning_gl(int(spec["k"]), int(spec["d"]), ring)
    from .errors import ConfigError
    raise ConfigError(f"unknown pinning kind {kind!r}")


@dataclass(frozen=True)
class SymbolicValue:
    text: str

    def __repr__(self):
        return self.text


class SymbolicPinning:
    """Type BC structure maps as formal symbols, backed by a 2-step module.

    ``module`` describes ``P_alpha`` for ultrashort ``alpha`` (its central
    part is ``P_{2 alpha}``).  Nothing evaluates; products are emitted in
    the fixed root order.
    """

    kind = "bc_symbolic"

    def __init__(self, rank: int, module=None):
        from .nilmod import SplitNilModule
        self.phi = build_root_system("BC", rank)
        self.module = module or SplitNilModule(1, 1, (((1,),),))
        self.order = tuple(sorted(self.phi.roots))
        self.position = {r: i for i, r in enumerate(self.order)}

    def f_terms(self, alpha, beta, p, q, coeffs=None, op=None):
        alpha, beta = tuple(alpha), tuple(beta)
        if alpha == tuple(-x for x in beta):
            raise AntiParallel(f"{alpha} and {beta} are anti-parallel")
        terms = []
        for i in range(1, 3):
            for j in range(1, 3):
                g = tuple(i * a + j * b for a, b in zip(alpha, beta))
                if g in self.phi.index and g not in (alpha, beta):
                    terms.append((g, SymbolicValue(f"f[{i},{j}]({p},{q})")))
        terms.sort(key=lambda t: self.position[t[0]])
        return terms


# --- words ----------------------------------------------------------------------

@dataclass(frozen=True)
class Letter:
    root: tuple
    value: object
    exp: int = 1


class SteinbergWord:
    """A product of root generators over one coefficient structure.

    Adjacent letters on the same root merge and zero letters vanish on
    construction.
    """

    def __init__(self, pinning, letters=(), coeffs=None):
        self.pinning = pinning
        self.coeffs = coeffs if coeffs is not None else getattr(pinning, "ring", None)
        self.letters = tuple(self._reduce(letters))

    def _reduce(self, letters):
        if isinstance(self.pinning, SymbolicPinning):
            return [Letter(tuple(l.root), l.value, l.exp) if isinstance(l, Letter)
                    else Letter(tuple(l[0]), l[1], l[2] if len(l) > 2 else 1) for l in letters]
        V = self.pinning.values(self.coeffs)
        out = []
        for l in letters:
            if not isinstance(l, Letter):
                l = Letter(tuple(l[0]), l[1], l[2] if len(l) > 2 else 1)
            if l.root not in self.pinning.phi.index:
                from .errors import InvalidRoot
                raise InvalidRoot(f"{l.root} is not a root")
            val = V.normalize(l.value)
            if V.is_zero(val):
                continue
            l = Letter(l.root, val, l.exp)
            if out and out[-1].root == l.root:
                prev = out.pop()
                a = prev.value if prev.exp == 1 else V.neg(prev.value)
                b = l.value if l.exp == 1 else V.neg(l.value)
                merged = V.normalize(V.add(a, b))
                if not V.is_zero(merged):
                    out.append(Letter(l.root, merged, 1))
                continue
            out.append(l)
        return out

    @classmethod
    def of(cls, pinning, pairs, coeffs=None):
        """From ``[(root, value), ...]``."""
        return cls(pinning, [Letter(tuple(r), v) for r, v in pairs], coeffs)

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __mul__(self, other):
        self._check(other)
        return SteinbergWord(self.pinning, self.letters + other.letters, self.coeffs)

    def _check(self, other):
        if other.pinning is not self.pinning and other.pinning != self.pinning:
            raise TypeMismatch("words over different pinnings")
        if other.coeffs != self.coeffs:
            raise TypeMismatch("words over different coefficient structures")

    def inverse(self):
        return SteinbergWord(self.pinning, [Letter(l.root, l.value, -l.exp) for l in reversed(self.letters)],
                             self.coeffs)

    def positive_letters(self):
        """Letters with exponent folded into the value: ``x(p)^-1 = x(-p)``."""
        V = self.pinning.values(self.coeffs)
        return [(l.root, l.value if l.exp == 1 else V.neg(l.value)) for l in self.letters]

    def map_values(self, fn, coeffs):
        return SteinbergWord(self.pinning, [Letter(l.root, fn(l.value), l.exp) for l in self.letters], coeffs)

    def shift(self, down_to: int):
        """Apply the tower's structure map to every value."""
        C = self.coeffs
        if not isinstance(C, HomotopeLevel):
            raise TypeMismatch("only homotope words shift")
        f = C.ring.pow(C.s, C.n - down_to)
        V = self.pinning.values(C)
        return self.map_values(lambda v: V.scale(f, v), HomotopeLevel(C.ring, C.s, down_to))

    def delta(self):
        """Image at ring level: ``x_alpha(a^(s^n)) -> x_alpha(s^n a)``."""
        C = self.coeffs
        if not isinstance(C, HomotopeLevel):
            return self
        V = self.pinning.values(C)
        return self.map_values(lambda v: V.scale(C.factor, v), C.ring)

    def same_letters(self, other):
        return self.letters == other.letters

    def to_dict(self):
        V = self.pinning.values(self.coeffs) if not isinstance(self.pinning, SymbolicPinning) else None
        return [{"root": list(l.root), "value": V.to_json(l.value) if V else repr(l.value), "exp": l.exp}
                for l in self.letters]

    def __repr__(self):
        parts = []
        for l in self.letters:
            if isinstance(self.pinning, Pinning):
                i, j = self.pinning.pair(l.root)
                name = f"x{i + 1}{j + 1}"
            else:
                name = f"x{l.root}"
            parts.append(f"{name}({l.value})" + ("^-1" if l.exp == -1 else ""))
        return "·".join(parts) or "ε"


# --- evaluation -------------------------------------------------------------------

class HomotopePoint:
    """``I + M`` with ``M`` over ``R^(s^n)``; product ``M + N + M s^n N``."""

    def __init__(self, pinning: Pinning, coeffs: HomotopeLevel, dev):
        self.pinning = pinning
        self.coeffs = coeffs
        self.alg = pinning.algebra()
        self.dev = self.alg.reduce(dev)

    @classmethod
    def identity(cls, pinning, coeffs):
        return cls(pinning, coeffs, pinning.algebra().zeros())

    def __mul__(self, other):
        A, f = self.alg, self.coeffs.factor
        return HomotopePoint(self.pinning, self.coeffs,
                             A.add(A.add(self.dev, other.dev), A.scale(f, A.mul(self.dev, other.dev))))

    def delta(self):
        A = self.alg
        return A.add(A.identity(), A.scale(self.coeffs.factor, self.dev))

    def inverse(self):
        A = self.alg
        return HomotopePoint(self.pinning, self.coeffs, A.scale(-1, A.mul(A.inverse(self.delta()), self.dev)))

    def conjugate_by(self, g, g_inv=None):
        """``g (I + M) g^-1`` for a ring-level matrix ``g``."""
        A = self.alg
        g_inv = A.inverse(g) if g_inv is None else g_inv
        return HomotopePoint(self.pinning, self.coeffs, A.mul(A.mul(g, self.dev), g_inv))

    def shift(self, down_to):
        C = self.coeffs
        f = C.ring.pow(C.s, C.n - down_to)
        return HomotopePoint(self.pinning, HomotopeLevel(C.ring, C.s, down_to), self.alg.scale(f, self.dev))

    def __eq__(self, other):
        return (isinstance(other, HomotopePoint) and self.coeffs == other.coeffs
                and self.alg.eq(self.dev, other.dev))

    def __hash__(self):
        return hash((self.coeffs, self.alg.key(self.dev)))

    def __repr__(self):
        return f"I+{self.alg.to_list(self.dev)} over {self.coeffs}"


def st_evaluate(w: SteinbergWord, pinning: Pinning | None = None):
    """Matrix of a word; a :class:`HomotopePoint` for homotope coefficients."""
    pin = pinning or w.pinning
    if isinstance(pin, SymbolicPinning):
        raise NotSupported("type BC pinnings have no matrix evaluator")
    C = w.coeffs
    alg = pin.algebra()
    if isinstance(C, HomotopeLevel):
        out = HomotopePoint.identity(pin, C)
        for root, value in w.positive_letters():
            out = out * HomotopePoint(pin, C, pin.place(root, value, C))
        return out
    out = alg.identity()
    for root, value in w.positive_letters():
        out = alg.add(out, alg.mul(out, pin.place(root, value)))
    return out


def eval_equal(a, b, pinning):
    if isinstance(a, HomotopePoint):
        return a == b
    return pinning.algebra().eq(a, b)


def commutator_word(u: SteinbergWord, v: SteinbergWord) -> SteinbergWord:
    return u * v * u.inverse() * v.inverse()


def commutator_expand(alpha, p, beta, q, pinning, coeffs=None) -> SteinbergWord:
    terms = pinning.f_terms(alpha, beta, p, q, coeffs)
    return SteinbergWord.of(pinning, terms, coeffs)


# --- collection -----------------------------------------------------------------

def _as_subset(pinning, sigma):
    if isinstance(sigma, RootSubset):
        return sigma
    return RootSubset.of(pinning.phi, sigma)


@lru_cache(maxsize=4096)
def _is_unipotent(phi, roots: frozenset) -> bool:
    return classify_subset(phi, sorted(roots)).unipotent


def collect_unipotent(w: SteinbergWord, sigma, order=None, max_steps: int = 100000) -> SteinbergWord:
    """Rewrite a word supported in a unipotent ``sigma`` to one letter per root, in ``order``."""
    pin = w.pinning
    sigma = _as_subset(pin, sigma)
    if not _is_unipotent(pin.phi, sigma.elements):
        raise NotUnipotent("the root set is not unipotent")
    doubled = {tuple(2 * x for x in r) for r in sigma.roots}
    roots = [r for r in sigma.roots if r not in doubled]
    if order is None:
        order = sorted(roots, key=lambda r: pin.position[r])
    pos = {tuple(r): i for i, r in enumerate(order)}
    letters = w.positive_letters()
    for root, _ in letters:
        if root not in pos:
            raise NotSupported(f"letter on {root} lies outside the unipotent set")
    V = pin.values(w.coeffs)
    steps = 0
    i = 0
    while i < len(letters) - 1:
        steps += 1
        if steps > max_steps:
            raise ResourceBound("collection did not finish within the step bound")
        (a, p), (b, q) = letters[i], letters[i + 1]
        if a == b:
            merged = V.add(p, q)
            letters[i:i + 2] = [] if V.is_zero(merged) else [(a, merged)]
            i = max(i - 1, 0)
        elif pos[a] > pos[b]:
            # x_a(p) x_b(q) = [x_a(p), x_b(q)] x_b(q) x_a(p)
            terms = pin.f_terms(a, b, p, q, w.coeffs)
            letters[i:i + 2] = [t for t in terms if not V.is_zero(t[1])] + [(b, q), (a, p)]
            i = max(i - 1, 0)
        else:
            i += 1
    letters = [(r, v) for r, v in letters if not V.is_zero(v)]
    return SteinbergWord.of(pin, letters, w.coeffs)


def unitriangular_word(pinning: Pinning, M, upper: bool = True, coeffs=None) -> SteinbergWord:
    """Letters of a block-unitriangular matrix, read off by left peeling in lex order."""
    alg = pinning.algebra()
    M = alg.reduce(np.array(M, dtype=alg.dtype))
    k = pinning.k
    # left multiplication by x_ij only touches row i, at columns beyond j (upper)
    # or before j (lower), so peel each row in the matching direction
    if upper:
        pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    else:
        pairs = [(i, j) for i in range(k) for j in reversed(range(i))]
    V = pinning.values()
    letters = []
    cur = M
    for i, j in pairs:
        r = pinning.root(i, j)
        c = pinning.block(cur, r)
        if not V.is_zero(c):
            letters.append((r, c))
            cur = alg.mul(pinning.t(r, V.neg(c)), cur)
    if not alg.is_identity(cur):
        raise PinningBroken("matrix is not block unitriangular")
    return SteinbergWord.of(pinning, letters, coeffs)


# --- Weyl triples ----------------------------------------------------------------

@dataclass
class WeylTriple:
    alpha: tuple
    a: object
    b: object
    c: object
    w: object

    def to_dict(self):
        return {"alpha": list(self.alpha), "a": self.a, "b": self.b, "c": self.c}


def weyl_word(pinning, alpha, a, b, c, coeffs=None) -> SteinbergWord:
    neg = tuple(-x for x in alpha)
    return SteinbergWord(pinning, [Letter(tuple(alpha), a), Letter(neg, b), Letter(tuple(alpha), c)], coeffs)


def _weyl_matrix(pinning, alpha, a, b, c):
    alg = pinning.algebra()
    neg = tuple(-x for x in alpha)
    return alg.mul(alg.mul(pinning.t(alpha, a), pinning.t(neg, b)), pinning.t(alpha, c))


def _weyl_inverse(pinning, alpha, a, b, c):
    alg = pinning.algebra()
    V = pinning.values()
    neg = tuple(-x for x in alpha)
    return alg.mul(alg.mul(pinning.t(alpha, V.neg(c)), pinning.t(neg, V.neg(b))), pinning.t(alpha, V.neg(a)))


def conjugate_root_element(pinning, w, w_inv, beta, q):
    """``(gamma, q')`` with ``w t_beta(q) w^-1 = t_gamma(q')``, or ``None``."""
    alg = pinning.algebra()
    g = alg.mul(alg.mul(w, pinning.t(beta, q)), w_inv)
    dev = alg.sub(g, alg.identity())
    nz = np.argwhere(dev != 0)
    if len(nz) == 0:
        return beta, pinning.values().zero
    d = pinning.d
    blocks = {(int(r) // d, int(c) // d) for r, c in nz}
    if len(blocks) != 1:
        return None
    (i, j), = blocks
    if i == j:
        return None
    gamma = pinning.root(i, j)
    return gamma, pinning.block(dev, gamma)


def is_weyl_element(pinning, w, w_inv, alpha) -> bool:
    """``w U_beta w^-1 = U_{s_alpha(beta)}`` for every root and ``w L w^-1 = L``."""
    V = pinning.values()
    elems = V.elements()
    for beta in pinning.phi.roots:
        target = reflect(alpha, beta)
        for q in elems:
            res = conjugate_root_element(pinning, w, w_inv, beta, q)
            if res is None or (res[0] != target and not V.is_zero(q)):
                return False
    return _normalizes_levi(pinning, w, w_inv)


def _normalizes_levi(pinning, w, w_inv):
    alg = pinning.algebra()
    d = pinning.d
    for D in _levi_cache(pinning):
        g = alg.mul(alg.mul(w, D), w_inv)
        for i in range(pinning.k):
            for j in range(pinning.k):
                if i != j and np.any(g[i * d:(i + 1) * d, j * d:(j + 1) * d]):
                    return False
    return True


def _levi_cache(pinning):
    cache = pinning.__dict__.setdefault("_levi", None)
    if cache is None:
        cache = pinning.levi_elements()
        pinning.__dict__["_levi"] = cache
    return cache


def weyl_from(alpha, c, pinning) -> WeylTriple:
    """The triple ``(c, -c^-1, c)`` ending in an invertible ``c``."""
    V = pinning.values()
    c = V.normalize(c)
    if not V.is_invertible(c):
        raise NotInvertible(f"{c} is not invertible in P_alpha")
    alpha = tuple(alpha)
    b = V.neg(V.inverse(c))
    w = _weyl_matrix(pinning, alpha, c, b, c)
    if not is_weyl_element(pinning, w, _weyl_inverse(pinning, alpha, c, b, c), alpha):
        raise PinningBroken("(c, -c^-1, c) does not give a Weyl element")
    return WeylTriple(alpha, c, b, c, w)


def weyl_conjugate(wt: WeylTriple, beta, q, pinning):
    """``(s_alpha(beta), q')`` with ``w t_beta(q) w^-1 = t_{s_alpha(beta)}(q')``."""
    w_inv = _weyl_inverse(pinning, wt.alpha, wt.a, wt.b, wt.c)
    res = conjugate_root_element(pinning, wt.w, w_inv, tuple(beta), q)
    target = reflect(wt.alpha, beta)
    V = pinning.values()
    if res is None:
        raise PinningBroken(f"conjugate of x_{beta}({q}) is not a root element")
    if V.is_zero(q):
        return target, V.zero
    if res[0] != target:
        raise PinningBroken(f"conjugate landed on {res[0]}, expected {target}")
    return res


# --- Weyl battery -------------------------------------------------------------------

def _all_weyl_triples(pinning, alpha):
    """Exhaustive search, vectorized over candidate triples."""
    V = pinning.values()
    alg = pinning.algebra()
    elems = V.elements()
    neg = tuple(-x for x in alpha)
    n = pinning.size
    I = alg.identity()
    T_pos = np.stack([pinning.t(alpha, x) for x in elems])
    T_neg = np.stack([pinning.t(neg, x) for x in elems])
    T_pos_inv = np.stack([pinning.t(alpha, V.neg(x)) for x in elems])
    T_neg_inv = np.stack([pinning.t(neg, V.neg(x)) for x in elems])
    idx = np.array(list(itertools.product(range(len(elems)), repeat=3)), dtype=np.int64)
    found = []
    mod = alg.reduce
    # root subgroup test data: every beta, every value
    tests = []
    d = pinning.d
    for beta in pinning.phi.roots:
        gamma = reflect(alpha, beta)
        i, j = pinning.pair(gamma)
        mask = np.ones((n, n), dtype=bool)
        mask[i * d:(i + 1) * d, j * d:(j + 1) * d] = False
        Tb = np.stack([pinning.t(beta, x) for x in elems])
        tests.append((Tb, mask))
    levi = np.stack(_levi_cache(pinning))
    off = np.ones((n, n), dtype=bool)
    for b in range(pinning.k):
        off[b * d:(b + 1) * d, b * d:(b + 1) * d] = False
    chunk = 256
    for start in range(0, len(idx), chunk):
        part = idx[start:start + chunk]
        W = mod(mod(T_pos[part[:, 0]] @ T_neg[part[:, 1]]) @ T_pos[part[:, 2]])
        Winv = mod(mod(T_pos_inv[part[:, 2]] @ T_neg_inv[part[:, 1]]) @ T_pos_inv[part[:, 0]])
        ok = np.ones(len(part), dtype=bool)
        for Tb, mask in tests:
            conj = mod(mod(W[:, None] @ Tb[None]) @ Winv[:, None])
            dev = (conj - I) % alg.m if alg.m else conj - I
            ok &= ~np.any(dev[:, :, mask], axis=(1, 2))
        if ok.any():
            conj = mod(mod(W[ok][:, None] @ levi[None]) @ Winv[ok][:, None])
            good = ~np.any(conj[:, :, off], axis=(1, 2))
            sel = np.flatnonzero(ok)[good]
            for r in sel:
                a, b, c = (elems[t] for t in part[r])
                found.append((a, b, c))
    return found


def check_root_units(pinning, bound: int = 5000) -> VerificationReport:
    """Weyl-triple claims (1), (2), (4), (5) by exhaustive search; (3) needs type BC."""
    report = VerificationReport("root_units", {"pinning": pinning.to_dict()})
    V = pinning.values()
    elems = V.elements()
    if len(elems) ** 3 > bound:
        raise ResourceBound(f"|P|^3 = {len(elems) ** 3} exceeds the search bound")
    alg = pinning.algebra()
    roots = pinning.order
    triples = {a: _all_weyl_triples(pinning, a) for a in roots}
    tset = {a: set(ts) for a, ts in triples.items()}
    winv = {}

    def weyl(alpha, t):
        key = (alpha, t)
        if key not in winv:
            winv[key] = (_weyl_matrix(pinning, alpha, *t), _weyl_inverse(pinning, alpha, *t))
        return winv[key]

    invertible = {x for x in elems if V.is_invertible(x)}
    report.data["triples_per_root"] = {str(list(a)): len(ts) for a, ts in triples.items()}

    # (1) the three derived triples, the position statement, and symmetry under negation
    bad, count = [], 0
    for alpha in roots:
        neg = tuple(-x for x in alpha)
        lasts = {t[2] for t in triples[alpha]}
        firsts = {t[0] for t in triples[alpha]}
        middles = {t[1] for t in triples[neg]}
        if not (lasts == firsts == middles == invertible):
            bad.append({"alpha": alpha, "reason": "position sets differ"})
        if {V.neg(x) for x in lasts} != lasts:
            bad.append({"alpha": alpha, "reason": "not closed under negation"})
        for t in triples[alpha]:
            a, b, c = t
            w, w_inv = weyl(alpha, t)
            count += 1
            if (V.neg(c), V.neg(b), V.neg(a)) not in tset[alpha]:
                bad.append({"alpha": alpha, "triple": t, "derived": "negated"})
            wc = conjugate_root_element(pinning, w, w_inv, alpha, c)
            if wc is None or wc[0] != neg or (wc[1], a, b) not in tset[neg]:
                bad.append({"alpha": alpha, "triple": t, "derived": "w c"})
            ia = conjugate_root_element(pinning, w_inv, w, alpha, a)
            if ia is None or ia[0] != neg or (b, c, ia[1]) not in tset[neg]:
                bad.append({"alpha": alpha, "triple": t, "derived": "w^-1 a"})
    report.add(Check.from_failures("claim1_derived_triples", count, bad))

    # (2) closure under conjugation by Weyl elements, and invertible sets move along
    bad, count = [], 0
    for gamma in roots:
        for tw in triples[gamma]:
            w, w_inv = weyl(gamma, tw)
            for alpha in roots:
                target = reflect(gamma, alpha)
                tneg = reflect(gamma, tuple(-x for x in alpha))
                for t in triples[alpha]:
                    count += 1
                    a = conjugate_root_element(pinning, w, w_inv, alpha, t[0])
                    b = conjugate_root_element(pinning, w, w_inv, tuple(-x for x in alpha), t[1])
                    c = conjugate_root_element(pinning, w, w_inv, alpha, t[2])
                    if None in (a, b, c) or a[0] != target or c[0] != target or b[0] != tneg \
                            or (a[1], b[1], c[1]) not in tset[target]:
                        bad.append({"w_root": gamma, "w_triple": tw, "alpha": alpha, "triple": t})
                image = set()
                for x in invertible:
                    res = conjugate_root_element(pinning, w, w_inv, alpha, x)
                    image.add(None if res is None else res[1])
                if image != invertible:
                    bad.append({"w_root": gamma, "alpha": alpha, "reason": "invertible set not preserved"})
    report.add(Check.from_failures("claim2_weyl_closure", count, bad))

    report.add(Check.skipped("claim3_ultrashort", "no matrix evaluator for type BC"))

    # (4) a triple is determined by each of its components
    if pinning.k - 1 < 2:
        report.add(Check.skipped("claim4_uniqueness", "RankTooSmall: the root system has rank 1"))
    else:
        bad = []
        for alpha in roots:
            for pos in range(3):
                comps = [t[pos] for t in triples[alpha]]
                if len(set(comps)) != len(comps):
                    bad.append({"alpha": alpha, "position": pos})
        report.add(Check.from_failures("claim4_uniqueness", 3 * len(roots), bad))

    # (5) f(e, -) is a bijection P_{s_alpha beta} -> P_beta matching invertible elements
    bad, count = [], 0
    for alpha in roots:
        for beta in neighbors(pinning.phi, alpha):
            src = reflect(alpha, beta)
            for e in invertible:
                count += 1
                image = {}
                for q in elems:
                    terms = pinning.f_terms(alpha, src, e, q)
                    val = terms[0][1] if terms and terms[0][0] == beta else V.zero
                    image[q] = V.normalize(val)
                if len(set(image.values())) != len(elems):
                    bad.append({"alpha": alpha, "beta": beta, "e": e, "reason": "not bijective"})
                    continue
                for q, r in itertools.product(elems, repeat=2):
                    if not V.eq(image[V.normalize(V.add(q, r))], V.add(image[q], image[r])):
                        bad.append({"alpha": alpha, "beta": beta, "e": e, "reason": "not additive"})
                        break
                if {image[q] for q in invertible} != invertible:
                    bad.append({"alpha": alpha, "beta": beta, "e": e, "reason": "invertibles not matched"})
    report.add(Check.from_failures("claim5_f_isomorphism", count, bad))
    return report


# --- relation soundness ---------------------------------------------------------

def relation_instances(pinning, coeffs=None, values=None):
    """Yield ``(kind, lhs_word, rhs_word, descriptor)`` for every relation instance."""
    V = pinning.values(coeffs)
    vals = values if values is not None else V.elements()
    for alpha in pinning.order:
        for p, q in itertools.product(vals, repeat=2):
            rhs = SteinbergWord(pinning, [Letter(alpha, V.add(p, q))], coeffs)
            # build the lhs without eager merging so evaluation really multiplies two letters
            raw = _Unmerged(pinning, [(alpha, p), (alpha, q)], coeffs)
            yield "additivity", raw, rhs, {"alpha": alpha, "p": p, "q": q}
    for alpha, beta in itertools.product(pinning.order, repeat=2):
        if alpha == tuple(-x for x in beta):
            continue
        for p, q in itertools.product(vals, repeat=2):
            raw = _Unmerged(pinning, [(alpha, p), (beta, q), (alpha, V.neg(p)), (beta, V.neg(q))], coeffs)
            rhs = commutator_expand(alpha, p, beta, q, pinning, coeffs)
            yield "commutator", raw, rhs, {"alpha": alpha, "beta": beta, "p": p, "q": q}


class _Unmerged:
    """Letter list evaluated exactly as written (no free reduction)."""

    def __init__(self, pinning, pairs, coeffs):
        self.pinning, self.pairs, self.coeffs = pinning, pairs, coeffs

    def evaluate(self):
        pin, C = self.pinning, self.coeffs
        if isinstance(C, HomotopeLevel):
            out = HomotopePoint.identity(pin, C)
            for r, v in self.pairs:
                out = out * HomotopePoint(pin, C, pin.place(r, v, C))
            return out
        alg = pin.algebra()
        out = alg.identity()
        for r, v in self.pairs:
            out = alg.mul(out, pin.t(r, v))
        return out


def check_relations(pinning, coeffs=None, values=None, suite="relations") -> VerificationReport:
    inst = {"pinning": pinning.to_dict()}
    if isinstance(coeffs, HomotopeLevel):
        inst.update(s=coeffs.s, level=coeffs.n)
    report = VerificationReport(suite, inst)
    counts = {"additivity": [0, []], "commutator": [0, []]}
    for kind, lhs, rhs, desc in relation_instances(pinning, coeffs, values):
        counts[kind][0] += 1
        if not eval_equal(lhs.evaluate(), st_evaluate(rhs), pinning):
            counts[kind][1].append(desc)
    for kind, (n, bad) in counts.items():
        report.add(Check.from_failures(kind, n, bad))
    return report


def check_scalar_compatibility(pinning, scalars=None) -> Check:
    """``f(x.k, y.k') = f(x, y).(k k')`` on every pair of roots with a structure map."""
    V = pinning.values()
    R = pinning.ring
    ks = scalars if scalars is not None else R.elements()
    vals = V.elements()
    if len(vals) > 16:
        vals = vals[:16]
    bad, n = [], 0
    for (alpha, beta) in pinning.signs:
        for p, q, k1, k2 in itertools.product(vals, vals, ks, ks):
            n += 1
            (g, lhs), = pinning.f_terms(alpha, beta, V.scale(k1, p), V.scale(k2, q))
            (_, base), = pinning.f_terms(alpha, beta, p, q)
            if not V.eq(lhs, V.scale(R.mul(k1, k2), base)):
                bad.append({"alpha": alpha, "beta": beta, "p": p, "q": q, "k": k1, "k'": k2})
    return Check.from_failures("scalar_compatibility", n, bad)


# --- perfectness and brackets -------------------------------------------------

def perfectness_witness(alpha, p, pinning) -> SteinbergWord:
    """``x_alpha(p) = [x_beta(e), x_{alpha-beta}(q)]`` with ``e`` invertible."""
    alpha = tuple(alpha)
    if pinning.phi.rank < 2:
        raise NoWitness("rank of the root system is below 2")
    V = pinning.values()
    if V.is_zero(p):
        return SteinbergWord(pinning, [])
    e = V.one()
    for beta in pinning.order:
        gamma = tuple(a - b for a, b in zip(alpha, beta))
        if gamma in pinning.phi.index and (beta, gamma) in pinning.signs:
            q = pinning.solve_f(beta, gamma, e, p)
            x = SteinbergWord(pinning, [Letter(beta, e)])
            y = SteinbergWord(pinning, [Letter(gamma, q)])
            return commutator_word(x, y)
    raise NoWitness(f"no decomposition of {alpha} into two roots")


def bracket_lift(g, h, wg: SteinbergWord, wh: SteinbergWord) -> SteinbergWord:
    """``[wg, wh]``, after checking that the words evaluate to ``g`` and ``h``."""
    pin = wg.pinning
    if not eval_equal(st_evaluate(wg), g, pin) or not eval_equal(st_evaluate(wh), h, pin):
        raise NotAPreimage("the words do not evaluate to the given matrices")
    return commutator_word(wg, wh)


def random_word(pinning, roots, rng, max_len=8, coeffs=None) -> SteinbergWord:
    V = pinning.values(coeffs)
    elems = V.elements()
    length = rng.randint(0, max_len)
    letters = [Letter(tuple(rng.choice(roots)), rng.choice(elems), rng.choice((1, -1))) for _ in range(length)]
    return SteinbergWord(pinning, letters, coeffs)


def collection_battery(pinning, count: int = 10000, seed: int = 0, max_len: int = 8,
                       coeffs=None) -> VerificationReport:
    """Seeded random words on the positive and on the negative roots."""
    import random

    rng = random.Random(seed)
    inst = {"pinning": pinning.to_dict(), "count": count, "max_len": max_len}
    if isinstance(coeffs, HomotopeLevel):
        inst.update(s=coeffs.s, level=coeffs.n)
    report = VerificationReport("collection", inst, seed=seed)
    pos = [r for r in pinning.order if r in set(pinning.phi.positive_roots)]
    neg = [tuple(-x for x in r) for r in reversed(pos)]
    setups = [(pos, pos), (neg, neg[::-1])]
    bad = {"evaluation_preserved": [], "idempotent": [], "length_bounded": [], "injective_on_forms": []}
    seen = [{}, {}]
    for t in range(count):
        which = t % 2
        sigma, order = setups[which]
        w = random_word(pinning, sigma, rng, max_len, coeffs)
        c = collect_unipotent(w, sigma, order)
        ev = st_evaluate(c)
        if not eval_equal(st_evaluate(w), ev, pinning):
            bad["evaluation_preserved"].append({"word": w.to_dict()})
        if not collect_unipotent(c, sigma, order).same_letters(c):
            bad["idempotent"].append({"word": w.to_dict()})
        if len(c) > len(sigma):
            bad["length_bounded"].append({"word": w.to_dict()})
        key = hash(ev) if isinstance(ev, HomotopePoint) else pinning.algebra().key(ev)
        prev = seen[which].setdefault(key, c)
        if not prev.same_letters(c):
            bad["injective_on_forms"].append({"a": prev.to_dict(), "b": c.to_dict()})
    for name, fails in bad.items():
        report.add(Check.from_failures(name, count, fails))
    return report
