"""Small commutative rings and the homotope coefficient structure.

Elements are plain Python values (``int`` for ``Z`` and ``Z/m``, tuples for
polynomial quotients).  ``Zmod`` arithmetic is written with ``+``, ``*`` and
``%`` only, so the same methods also accept numpy integer arrays; the
exhaustive sweeps rely on this to evaluate the library operations on whole
carriers at once.
"""

from __future__ import annotations

import itertools
from functools import cached_property

from .errors import ConfigError, NotInvertible, NotSupported


class Ring:
    """Commutative unital ring interface."""

    is_finite = True

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def pow(self, a, k: int):
        if k < 0:
            raise ValueError("negative exponent")
        result = self.one
        base = a
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def eq(self, a, b) -> bool:
        return self.normalize(a) == self.normalize(b)

    def is_zero(self, a) -> bool:
        return self.eq(a, self.zero)

    def normalize(self, a):
        return a

    def sum(self, items):
        total = self.zero
        for x in items:
            total = self.add(total, x)
        return total

    @cached_property
    def _unit_table(self):
        table = {}
        for a in self.elements():
            for b in self.elements():
                if self.eq(self.mul(a, b), self.one):
                    table[a] = b
                    break
        return table

    def is_unit(self, a) -> bool:
        return self.normalize(a) in self._unit_table

    def inverse(self, a):
        try:
            return self._unit_table[self.normalize(a)]
        except KeyError:
            raise NotInvertible(f"{a!r} is not a unit in {self}") from None

    def units(self):
        return sorted(self._unit_table)

    def is_local(self) -> bool:
        """Non-units closed under addition (finite rings only)."""
        non_units = [a for a in self.elements() if not self.is_unit(a)]
        if not self.is_unit(self.one):
            return False
        nset = set(non_units)
        return all(self.add(a, b) in nset for a in non_units for b in non_units)

    def __eq__(self, other):
        return type(self) is type(other) and self.key() == other.key()

    def __hash__(self):
        return hash((type(self).__name__, self.key()))

    def __repr__(self):
        return self.label()


class Integers(Ring):
    is_finite = False
    zero = 0
    one = 1
    size = None

    def key(self):
        return ()

    def label(self):
        return "Z"

    def to_dict(self):
        return {"kind": "Z"}

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def from_int(self, k):
        return k

    def is_unit(self, a):
        return a in (1, -1)

    def inverse(self, a):
        if a in (1, -1):
            return a
        raise NotInvertible(f"{a} is not a unit in Z")

    def units(self):
        return [-1, 1]

    def elements(self):
        raise NotSupported("Z has no finite carrier")


class Zmod(Ring):
    def __init__(self, m: int):
        if m < 1:
            raise ConfigError(f"modulus must be positive, got {m}")
        self.m = m
        self.zero = 0
        self.one = 1 % m
        self.size = m

    def key(self):
        return (self.m,)

    def label(self):
        return f"Z/{self.m}"

    def to_dict(self):
        return {"kind": "Zmod", "m": self.m}

    def add(self, a, b):
        return (a + b) % self.m

    def neg(self, a):
        return (-a) % self.m

    def sub(self, a, b):
        return (a - b) % self.m

    def mul(self, a, b):
        return (a * b) % self.m

    def pow(self, a, k):
        if isinstance(a, int):
            return pow(a, k, self.m)
        return super().pow(a, k)

    def normalize(self, a):
        return a % self.m

    def from_int(self, k):
        return k % self.m

    def elements(self):
        return list(range(self.m))

    @cached_property
    def _unit_table(self):
        table = {}
        for a in range(self.m):
            try:
                table[a] = pow(a, -1, self.m)
            except ValueError:
                pass
        if self.m == 1:
            table[0] = 0
        return table

    # additive structure, used by the presentation checks
    def additive_gens(self):
        return [self.one]

    def additive_orders(self):
        return [self.m]

    def coords(self, a):
        return [a % self.m]


class PolyQuotient(Ring):
    """``(Z/m)[x]/(f)`` with ``f`` monic; ``f`` given low degree first, leading 1 included."""

    def __init__(self, m: int, f):
        f = [c % m for c in f]
        if m < 1 or len(f) < 2 or f[-1] != 1 % m:
            raise ConfigError("need m >= 1 and a monic polynomial of degree >= 1")
        self.m = m
        self.f = tuple(f)
        self.d = len(f) - 1
        self.zero = (0,) * self.d
        self.one = ((1 % m),) + (0,) * (self.d - 1)
        self.size = m ** self.d

    def key(self):
        return (self.m, self.f)

    def label(self):
        terms = "+".join(str(c) for c in self.f)
        return f"Z/{self.m}[x]/({terms})"

    def to_dict(self):
        return {"kind": "ZmodPoly", "m": self.m, "f": list(self.f)}

    def add(self, a, b):
        return tuple((x + y) % self.m for x, y in zip(a, b))

    def neg(self, a):
        return tuple((-x) % self.m for x in a)

    def mul(self, a, b):
        prod = [0] * (2 * self.d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        # reduce by x^d = -(f_0 + ... + f_{d-1} x^{d-1})
        for k in range(len(prod) - 1, self.d - 1, -1):
            c = prod[k] % self.m
            if c:
                for i in range(self.d):
                    prod[k - self.d + i] -= c * self.f[i]
            prod[k] = 0
        return tuple(c % self.m for c in prod[: self.d])

    def normalize(self, a):
        return tuple(x % self.m for x in a)

    def from_int(self, k):
        return ((k % self.m),) + (0,) * (self.d - 1)

    def elements(self):
        return [tuple(c) for c in itertools.product(range(self.m), repeat=self.d)]

    def additive_gens(self):
        return [tuple(1 if i == j else 0 for i in range(self.d)) for j in range(self.d)]

    def additive_orders(self):
        return [self.m] * self.d

    def coords(self, a):
        return [x % self.m for x in a]


def make_ring(spec) -> Ring:
    """Build a ring from ``"Z"``, ``"Zmod:8"``, ``"ZmodPoly:2:1,1,1"`` or a dict."""
    if isinstance(spec, Ring):
        return spec
    if isinstance(spec, str):
        parts = spec.split(":")
        kind = parts[0]
        try:
            if kind == "Z" and len(parts) == 1:
                return Integers()
            if kind == "Zmod" and len(parts) == 2:
                return Zmod(int(parts[1]))
            if kind == "ZmodPoly" and len(parts) == 3:
                return PolyQuotient(int(parts[1]), [int(c) for c in parts[2].split(",")])
        except ValueError as exc:
            raise ConfigError(f"bad ring spec {spec!r}") from exc
        raise ConfigError(f"bad ring spec {spec!r}")
    if isinstance(spec, dict):
        kind = spec.get("kind")
        if kind == "Z":
            return Integers()
        if kind == "Zmod":
            return Zmod(int(spec["m"]))
        if kind == "ZmodPoly":
            return PolyQuotient(int(spec["m"]), spec["f"])
    raise ConfigError(f"bad ring spec {spec!r}")


class HomotopeLevel:
    """Coefficient structure of ``R^(s^n)``: same group as ``R``, product ``a s^n b``.

    Not unital in general; ``rmul`` is the action of ``R`` and ``delta`` the
    ring map to ``R`` given by multiplication with ``s^n``.
    """

    def __init__(self, ring: Ring, s, n: int):
        if n < 0:
            raise ValueError("level must be non-negative")
        self.ring = ring
        self.s = ring.normalize(s) if ring.is_finite else s
        self.n = n
        self.factor = ring.pow(self.s, n)
        self.zero = ring.zero

    def __repr__(self):
        return f"{self.ring}^({self.s}^{self.n})"

    def __eq__(self, other):
        return (isinstance(other, HomotopeLevel) and self.ring == other.ring
                and self.s == other.s and self.n == other.n)

    def __hash__(self):
        return hash((self.ring, self.s, self.n))

    @property
    def is_finite(self):
        return self.ring.is_finite

    def elements(self):
        return self.ring.elements()

    def add(self, a, b):
        return self.ring.add(a, b)

    def neg(self, a):
        return self.ring.neg(a)

    def sub(self, a, b):
        return self.ring.sub(a, b)

    def mul(self, a, b):
        return self.ring.mul(self.ring.mul(a, self.factor), b)

    def rmul(self, r, a):
        return self.ring.mul(r, a)

    def delta(self, a):
        return self.ring.mul(self.factor, a)

    def eq(self, a, b):
        return self.ring.eq(a, b)

    def is_zero(self, a):
        return self.ring.is_zero(a)

    def normalize(self, a):
        return self.ring.normalize(a)

    def sum(self, items):
        return self.ring.sum(items)
