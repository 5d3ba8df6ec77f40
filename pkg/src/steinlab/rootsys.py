"""Root systems of types A, B, C, D, BC in their standard integer realizations.

Roots are integer tuples.  The inner product is the standard one on the
ambient lattice (``A_n`` lives in ``Z^(n+1)``), so the Gram matrix is the
identity.  Everything here is exact; angles are compared through the signed
value of ``cos^2``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

from .errors import HypothesisNotMet, InvalidRoot, InvalidRootSystem
from .linalg import Subspace, dot, integer_row, rank

FAMILIES = ("A", "B", "C", "D", "BC")


def _unit(n, i, c=1):
    v = [0] * n
    v[i] = c
    return v


def _standard_roots(family, rank_):
    n = rank_ + 1 if family == "A" else rank_
    roots = set()
    if family == "A":
        for i, j in itertools.permutations(range(n), 2):
            v = [0] * n
            v[i], v[j] = 1, -1
            roots.add(tuple(v))
        return n, roots
    for i, j in itertools.combinations(range(n), 2):
        for a, b in itertools.product((1, -1), repeat=2):
            v = [0] * n
            v[i], v[j] = a, b
            roots.add(tuple(v))
    for i in range(n):
        for a in (1, -1):
            if family in ("B", "BC"):
                roots.add(tuple(_unit(n, i, a)))
            if family in ("C", "BC"):
                roots.add(tuple(_unit(n, i, 2 * a)))
    return n, roots


@dataclass(frozen=True, eq=False)
class RootSystem:
    family: str
    rank: int
    dim: int
    roots: tuple

    def __eq__(self, other):
        return isinstance(other, RootSystem) and (self.family, self.rank) == (other.family, other.rank)

    def __hash__(self):
        return hash((self.family, self.rank))

    def __repr__(self):
        return f"{self.family}{self.rank}"

    @property
    def name(self):
        return f"{self.family}{self.rank}"

    @property
    def gram(self):
        return tuple(tuple(int(i == j) for j in range(self.dim)) for i in range(self.dim))

    @cached_property
    def index(self):
        return {r: i for i, r in enumerate(self.roots)}

    def __contains__(self, v):
        return tuple(v) in self.index

    def __iter__(self):
        return iter(self.roots)

    def __len__(self):
        return len(self.roots)

    @cached_property
    def height_functional(self):
        # strictly decreasing positive weights: regular on every root here
        return tuple(range(self.dim, 0, -1))

    @cached_property
    def positive_roots(self):
        f = self.height_functional
        return tuple(r for r in self.roots if dot(f, r) > 0)

    @cached_property
    def simple_roots(self):
        pos = set(self.positive_roots)
        sums = {tuple(a + b for a, b in zip(x, y)) for x in pos for y in pos}
        return tuple(r for r in self.positive_roots if r not in sums)

    @cached_property
    def span(self):
        return Subspace.span(self.roots, self.dim)

    def is_ultrashort(self, alpha):
        return tuple(2 * a for a in alpha) in self.index

    @cached_property
    def chamber_functionals(self):
        """W-orbit of the height functional, one regular functional per chamber."""
        start = self.height_functional
        seen = {start}
        frontier = [start]
        while frontier:
            nxt = []
            for f in frontier:
                for a in self.simple_roots:
                    g = reflect(a, f)
                    if g not in seen:
                        seen.add(g)
                        nxt.append(g)
            frontier = nxt
        return sorted(seen)

    @cached_property
    def components(self):
        return components(self.roots)

    def to_dict(self):
        return {"family": self.family, "rank": self.rank, "roots": [list(r) for r in self.roots]}


def build_root_system(family: str, rank_: int) -> RootSystem:
    if family not in FAMILIES:
        raise InvalidRootSystem(f"unsupported family {family!r}")
    if not isinstance(rank_, int) or rank_ < 1:
        raise InvalidRootSystem(f"rank must be a positive integer, got {rank_!r}")
    if family == "D" and rank_ < 2:
        raise InvalidRootSystem("type D needs rank >= 2")
    dim, roots = _standard_roots(family, rank_)
    return RootSystem(family, rank_, dim, tuple(sorted(roots)))


def parse_system(name: str) -> RootSystem:
    """``"BC3"`` -> ``build_root_system("BC", 3)``."""
    fam = name.rstrip("0123456789")
    digits = name[len(fam):]
    if not digits:
        raise InvalidRootSystem(f"cannot parse root system {name!r}")
    return build_root_system(fam, int(digits))


def reflect(alpha, beta):
    """``s_alpha(beta) = beta - 2 (alpha.beta)/(alpha.alpha) alpha``."""
    aa = dot(alpha, alpha)
    if aa == 0:
        raise InvalidRoot("cannot reflect in the zero vector")
    c = Fraction(2 * dot(alpha, beta), aa)
    out = tuple(b - c * a for a, b in zip(alpha, beta))
    if all(x.denominator == 1 if isinstance(x, Fraction) else True for x in out):
        return tuple(int(x) for x in out)
    return out


def signed_cos2(alpha, beta):
    """``(sign(cos), cos^2)`` of the angle between two nonzero vectors."""
    d = dot(alpha, beta)
    c2 = Fraction(d * d, dot(alpha, alpha) * dot(beta, beta))
    return (d > 0) - (d < 0), c2


ANGLES = {
    "pi/4": (1, Fraction(1, 2)),
    "pi/3": (1, Fraction(1, 4)),
    "pi/2": (0, Fraction(0)),
    "2pi/3": (-1, Fraction(1, 4)),
    "3pi/4": (-1, Fraction(1, 2)),
}


def angle_label(alpha, beta):
    sc = signed_cos2(alpha, beta)
    for label, val in ANGLES.items():
        if val == sc:
            return label
    if sc == (1, 1):
        return "0"
    if sc == (-1, 1):
        return "pi"
    return None


def cone_coefficients(alpha, beta, gamma):
    """Coefficients ``(a, b)`` with ``gamma = a alpha + b beta``, or None."""
    aa, ab, bb = dot(alpha, alpha), dot(alpha, beta), dot(beta, beta)
    det = aa * bb - ab * ab
    if det == 0:
        return None
    ga, gb = dot(gamma, alpha), dot(gamma, beta)
    a = Fraction(ga * bb - gb * ab, det)
    b = Fraction(gb * aa - ga * ab, det)
    if all(a * x + b * y == z for x, y, z in zip(alpha, beta, gamma)):
        return a, b
    return None


def linearly_independent(*vectors) -> bool:
    return rank(vectors) == len(vectors)


def are_neighbors(phi: RootSystem, alpha, beta) -> bool:
    """Independent, non-orthogonal, and no root strictly inside the cone they span."""
    alpha, beta = tuple(alpha), tuple(beta)
    if not linearly_independent(alpha, beta) or dot(alpha, beta) == 0:
        return False
    for g in phi.roots:
        ab = cone_coefficients(alpha, beta, g)
        if ab is not None and ab[0] > 0 and ab[1] > 0:
            return False
    return True


def neighbors(phi: RootSystem, alpha):
    return [b for b in phi.roots if are_neighbors(phi, alpha, b)]


@lru_cache(maxsize=None)
def neighbor_table(phi: RootSystem):
    """``{alpha: frozenset of neighbors}`` for every root, computed once per system."""
    return {a: frozenset(neighbors(phi, a)) for a in phi.roots}


def components(roots):
    """Irreducible components (as sorted tuples) under non-orthogonality."""
    roots = list(roots)
    todo = set(range(len(roots)))
    comps = []
    while todo:
        start = min(todo)
        todo.discard(start)
        comp = [start]
        stack = [start]
        while stack:
            i = stack.pop()
            for j in list(todo):
                if dot(roots[i], roots[j]) != 0:
                    todo.discard(j)
                    comp.append(j)
                    stack.append(j)
        comps.append(tuple(sorted(roots[i] for i in comp)))
    return sorted(comps)


@dataclass(frozen=True)
class RootSubset:
    system: RootSystem
    elements: frozenset

    @classmethod
    def of(cls, system, roots):
        roots = frozenset(tuple(r) for r in roots)
        missing = [r for r in roots if r not in system]
        if missing:
            raise InvalidRoot(f"not roots of {system}: {sorted(missing)}")
        return cls(system, roots)

    @property
    def roots(self):
        return tuple(sorted(self.elements))

    def __contains__(self, r):
        return tuple(r) in self.elements

    def __iter__(self):
        return iter(self.roots)

    def __len__(self):
        return len(self.elements)

    def to_list(self):
        return [list(r) for r in self.roots]


@dataclass(frozen=True)
class SubsetClass:
    closed: bool
    unipotent: bool
    saturated: bool
    functional: tuple | None = None


def is_closed(phi, sigma) -> bool:
    sig = set(sigma)
    for a in sig:
        for b in sig:
            c = tuple(x + y for x, y in zip(a, b))
            if c in phi.index and c not in sig:
                return False
    return True


def half_space_functional(phi, sigma):
    """Integer functional strictly positive on ``sigma``, or None.

    A finite set lies in an open half-space iff it lies in some positive
    system, so scanning one regular functional per Weyl chamber is exact.
    """
    sigma = list(sigma)
    for f in phi.chamber_functionals:
        if all(dot(f, r) > 0 for r in sigma):
            return f
    return None


def classify_subset(phi: RootSystem, sigma) -> SubsetClass:
    sigma = [tuple(r) for r in sigma]
    closed = is_closed(phi, sigma)
    f = half_space_functional(phi, sigma) if closed else None
    sat = False
    if sigma:
        sp = Subspace.span(sigma, phi.dim)
        sat = {r for r in phi.roots if sp.contains(r)} == set(sigma)
    else:
        sat = True  # the zero subspace meets Phi in the empty set
    return SubsetClass(closed, f is not None, sat, f)


def saturated_closure(phi, vectors):
    sp = Subspace.span(vectors, phi.dim)
    return frozenset(r for r in phi.roots if sp.contains(r))


def rank2_saturated_through(phi: RootSystem, alpha):
    """All rank 2 irreducible saturated subsystems containing ``alpha``."""
    return [RootSubset(phi, s) for s in _rank2_through(phi, tuple(alpha))]


def _rank2_through(phi, alpha):
    cache = phi.__dict__.setdefault("_rank2_cache", {})
    if alpha in cache:
        return cache[alpha]
    found = {}
    for b in phi.roots:
        if not linearly_independent(alpha, b):
            continue
        psi = saturated_closure(phi, [alpha, b])
        if psi in found:
            continue
        if len(components(psi)) == 1:
            found[psi] = True
    out = sorted(found, key=lambda s: tuple(sorted(s)))
    cache[alpha] = out
    return out


def is_k_small(phi: RootSystem, V: Subspace, k: int) -> bool:
    for comp in phi.components:
        span = Subspace.span(comp, phi.dim)
        if span.dim - span.intersect_dim(V) < k:
            return False
    return True


def root_spanned_subspaces(phi: RootSystem, max_dim=None):
    """Every distinct subspace spanned by a subset of ``phi`` (including 0)."""
    zero = Subspace.zero(phi.dim)
    seen = {zero}
    layer = [zero]
    while layer:
        nxt = []
        for V in layer:
            if max_dim is not None and V.dim >= max_dim:
                continue
            for r in phi.roots:
                if V.contains(r):
                    continue
                W = V.add_vectors([r])
                if W not in seen:
                    seen.add(W)
                    nxt.append(W)
        layer = nxt
    return sorted(seen, key=lambda V: (V.dim, V.integer_basis))


def random_subspaces(phi: RootSystem, count: int, seed: int, max_dim=None):
    """Seeded rational subspaces of R(phi): a root plus random rational directions."""
    rng = random.Random(seed)
    basis = [list(r) for r in phi.span.integer_basis]
    out = []
    for _ in range(count):
        d = rng.randint(1, max_dim or phi.rank)
        vecs = []
        if rng.random() < 0.7:
            vecs.append(rng.choice(phi.roots))
        while len(vecs) < d:
            coeffs = [Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in basis]
            vecs.append(tuple(sum(c * b[i] for c, b in zip(coeffs, basis)) for i in range(phi.dim)))
        out.append(Subspace.span(vecs, phi.dim))
    return out


CLAIM_SMALLNESS = {1: 1, 2: 2, 3: 2, 4: 2, 5: 2}


@dataclass
class SmallSubspResult:
    claim: int
    V: Subspace
    roots: tuple
    status: str  # "certificate" or "counterexample"
    psi: tuple | None = None

    def to_dict(self):
        return {"claim": self.claim, "V": self.V.to_dict(),
                "witnesses": {"roots": [list(r) for r in self.roots],
                              "psi": [list(r) for r in self.psi] if self.psi else None},
                "status": self.status}


class SmallSubspaceChecker:
    """Caches the rational data needed to test one subspace ``V`` of ``R phi``."""

    def __init__(self, phi: RootSystem, V: Subspace, enforce_smallness=True):
        self.phi = phi
        self.enforce_smallness = enforce_smallness
        self.V = V
        self._res = {}
        self._rank_cache = {}
        self.in_V = {r: V.contains(r) for r in phi.roots}
        self._small = {}

    def residue(self, r):
        try:
            return self._res[r]
        except KeyError:
            v = integer_row(self.V.residue(r))
            self._res[r] = v
            return v

    def meet_dim(self, vectors):
        """dim(span(vectors) ∩ V)."""
        key = frozenset(vectors)
        try:
            return self._rank_cache[key]
        except KeyError:
            pass
        vs = list(key)
        d = rank(vs) - rank([self.residue(v) for v in vs])
        self._rank_cache[key] = d
        return d

    def small(self, k):
        if k not in self._small:
            self._small[k] = is_k_small(self.phi, self.V, k)
        return self._small[k]

    def _require(self, cond, msg):
        if not cond:
            raise HypothesisNotMet(msg)

    def check_hypothesis(self, claim, roots):
        phi = self.phi
        self._require(claim in CLAIM_SMALLNESS, f"unknown claim {claim}")
        self._require(all(phi.span.contains(v) for v in self.V.rows), "V is not inside R(Phi)")
        need = {1: 1, 2: 2, 3: 2, 4: 3, 5: 3}[claim]
        self._require(len(roots) == need, f"claim {claim} takes {need} roots")
        self._require(all(r in phi.index for r in roots), "arguments must be roots")
        k = CLAIM_SMALLNESS[claim]
        if self.enforce_smallness:
            self._require(self.small(k), f"V is not {k}-small")
        if claim == 1:
            self._require(self.in_V[roots[0]], "alpha must lie in V")
        elif claim == 2:
            a, b = roots
            self._require(linearly_independent(a, b), "alpha, beta must be independent")
            self._require(self.meet_dim((a, b)) == 1, "(R alpha + R beta) ∩ V must be a line")
        elif claim == 3:
            a, b = roots
            self._require(self.in_V[a] and self.in_V[b], "alpha, beta must lie in V")
            self._require(linearly_independent(a, b), "alpha, beta must be independent")
        else:
            a, b, g = roots
            self._require(self.in_V[a], "alpha must lie in V")
            self._require(not self.in_V[b] and not self.in_V[g], "beta, gamma must lie outside V")
            self._require(linearly_independent(a, b, g), "alpha, beta, gamma must be independent")
            self._require(self.meet_dim((a, b, g)) == 2, "(R alpha + R beta + R gamma) ∩ V must be a plane")

    def _psi_gens(self, psi):
        return tuple(sorted(psi))[:1] + (self._second_gen(psi),)

    def _second_gen(self, psi):
        roots = sorted(psi)
        first = roots[0]
        return next(r for r in roots[1:] if linearly_independent(first, r))

    def conclusion(self, claim, roots, psi):
        gens = self._psi_gens(psi)
        if claim == 1:
            return self.meet_dim(gens) == 1
        if claim == 2:
            a, b = roots
            return b not in psi and self.meet_dim(gens + (b,)) == 1
        if claim == 3:
            a, b = roots
            return b not in psi and self.meet_dim(gens) == 1
        if claim == 4:
            a, b, g = roots
            return (b not in psi and g not in psi
                    and self.meet_dim(gens + (b,)) == 1 and self.meet_dim(gens + (g,)) == 1)
        a, b, g = roots
        return rank([a, b, *gens]) == 4 and self.meet_dim(gens + (a, b)) == 2

    def certify(self, claim, roots, check=True):
        roots = tuple(tuple(r) for r in roots)
        if check:
            self.check_hypothesis(claim, roots)
        through = roots[2] if claim == 5 else roots[0]
        for psi in _rank2_through(self.phi, through):
            if self.conclusion(claim, roots, psi):
                return SmallSubspResult(claim, self.V, roots, "certificate", tuple(sorted(psi)))
        return SmallSubspResult(claim, self.V, roots, "counterexample")

    def admissible_tuples(self, claim):
        """Every root tuple meeting the claim's hypotheses (V's smallness aside)."""
        phi = self.phi
        inside = [r for r in phi.roots if self.in_V[r]]
        outside = [r for r in phi.roots if not self.in_V[r]]
        if claim == 1:
            for a in inside:
                yield (a,)
        elif claim == 2:
            for a in phi.roots:
                for b in phi.roots:
                    if linearly_independent(a, b) and self.meet_dim((a, b)) == 1:
                        yield (a, b)
        elif claim == 3:
            for a in inside:
                for b in inside:
                    if linearly_independent(a, b):
                        yield (a, b)
        else:
            if self.V.dim < 2:
                return
            for a in inside:
                for b in outside:
                    if not linearly_independent(a, b):
                        continue
                    for g in outside:
                        if linearly_independent(a, b, g) and self.meet_dim((a, b, g)) == 2:
                            yield (a, b, g)


def certify_small_subsp(phi: RootSystem, claim: int, V: Subspace, *roots,
                        enforce_smallness=True) -> SmallSubspResult:
    """Search a rank 2 subsystem witnessing one claim about small subspaces.

    Raises ``HypothesisNotMet`` if V or the roots violate the claim's hypotheses;
    returns a ``counterexample`` result if no subsystem works.  With
    ``enforce_smallness=False`` only the root side conditions are checked.
    """
    return SmallSubspaceChecker(phi, V, enforce_smallness).certify(claim, roots)


def certify_all(phi: RootSystem, claims=(1, 2, 3, 4, 5), subspaces=None):
    """Exhaustive sweep; yields (V, claim, tuples checked, counterexamples)."""
    if subspaces is None:
        subspaces = root_spanned_subspaces(phi)
    for V in subspaces:
        if not all(phi.span.contains(v) for v in V.rows):
            continue
        checker = SmallSubspaceChecker(phi, V)
        for claim in claims:
            if not checker.small(CLAIM_SMALLNESS[claim]):
                continue
            count = 0
            bad = []
            for tup in checker.admissible_tuples(claim):
                count += 1
                res = checker.certify(claim, tup, check=False)
                if res.status != "certificate":
                    bad.append(res)
            yield V, claim, count, bad


def weyl_orbit(phi: RootSystem, S):
    """Orbit of a root set (or an ordered configuration) under the Weyl group."""
    ordered = isinstance(S, (tuple, list)) and not isinstance(S, RootSubset)
    if isinstance(S, RootSubset):
        S = S.elements
    start = tuple(tuple(r) for r in S) if ordered else frozenset(tuple(r) for r in S)
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for item in frontier:
            for a in phi.simple_roots:
                img = tuple(reflect(a, r) for r in item)
                img = img if ordered else frozenset(img)
                if img not in seen:
                    seen.add(img)
                    nxt.append(img)
        frontier = nxt
    if ordered:
        return sorted(seen)
    return sorted(seen, key=lambda s: tuple(sorted(s)))


# --- case table for relations that hold vacuously -------------------------

def _v(*terms):
    """Vector in Z^3 from terms like (1, 'e1'), (-1, 'e2')."""
    out = [0, 0, 0]
    for c, e in terms:
        out[int(e[1]) - 1] += c
    return tuple(out)


E1, E2, E3 = _v((1, "e1")), _v((1, "e2")), _v((1, "e3"))


def _add(*vs):
    return tuple(sum(x) for x in zip(*vs))


def _neg(v):
    return tuple(-x for x in v)


def _scale(c, v):
    return tuple(c * x for x in v)


@dataclass(frozen=True)
class VacuousRow:
    psi_type: str  # "A3", "not A3" or "any"
    alpha: tuple  # tuple of admissible variants
    beta: tuple
    angle: str
    gamma: tuple
    condition: str = ""

    def to_dict(self):
        return {"psi_type": self.psi_type,
                "alpha": [list(v) for v in self.alpha],
                "beta": [list(v) for v in self.beta],
                "angle": self.angle,
                "gamma": [list(v) for v in self.gamma],
                "condition": self.condition}


def table_vacuous_rel():
    """The nine cases (realized inside D3 ⊆ BC3) for relations between an
    eliminated generator pair whose cone misses V."""
    e12, e13, e23 = _add(E1, E2), _add(E1, E3), _add(E2, E3)
    m12, m13 = _add(E1, _neg(E2)), _add(E1, _neg(E3))
    return [
        VacuousRow("not A3", (e13,), (E1, _scale(2, E1)), "pi/4", (m12,)),
        VacuousRow("A3", (e13,), (e23,), "pi/3", (e12,)),
        VacuousRow("not A3", (e12,), (e23,), "pi/3", (E1, _scale(2, E1))),
        VacuousRow("A3", (e12,), (m12,), "pi/2", (m13,), "rho != R>=0 e1"),
        VacuousRow("not A3", (_add(E3, E2),), (_add(E3, _neg(E2)),), "pi/2", (_add(E3, _neg(E1)),)),
        VacuousRow("not A3", (E1, _scale(2, E1)), (E2, _scale(2, E2)), "pi/2", (e13,)),
        VacuousRow("not A3", (e12,), (E3, _scale(2, E3)), "pi/2", (e13,), "rho != R>=0 (e1+e2+e3)"),
        VacuousRow("any", (e12,), (_add(E3, _neg(E2)),), "2pi/3", (e23,)),
        VacuousRow("not A3", (m12,), (E2,), "3pi/4", (m13,)),
    ]


_ROW_SYSTEMS = {"A3": ("D",), "not A3": ("B", "C", "BC"), "any": ("D", "B", "C", "BC")}


def check_vacuous_row(row: VacuousRow):
    """Recompute angle, root membership, neighborliness and independence.

    Each combination of variants is checked in every rank 3 realization of
    the row's type that contains all three roots; returns a list of failure
    messages (empty when the row checks out).
    """
    failures = []
    applicable = 0
    for fam in _ROW_SYSTEMS[row.psi_type]:
        phi = build_root_system(fam, 3)
        for a, b, g in itertools.product(row.alpha, row.beta, row.gamma):
            if not (a in phi and b in phi and g in phi):
                continue
            applicable += 1
            if signed_cos2(a, b) != ANGLES[row.angle]:
                failures.append(f"{fam}3: angle({a},{b}) is not {row.angle}")
            if not are_neighbors(phi, g, a):
                failures.append(f"{fam}3: {g} is not a neighbor of {a}")
            if linearly_independent(a, b) and not linearly_independent(a, b, g):
                failures.append(f"{fam}3: {g} lies in span({a},{b})")
            if not linearly_independent(a, b):
                failures.append(f"{fam}3: {a}, {b} are dependent")
    if applicable == 0:
        failures.append("no realization contains the row's roots")
    return failures
