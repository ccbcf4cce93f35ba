"""Length-two local rings with residue field F_q.

Both ring kinds share one coordinate system: an element is a pair (a, b) of
residue-field elements standing for

    s(a) + pi*s(b)          unramified (Galois ring W_2(F_q), pi = p)
    a + t*b                 ramified   (F_q[t]/t^2, pi = t)

with s the multiplicative (Teichmueller) section.  Multiplication is
(a, b)(c, d) = (ac, ad + bc) for both kinds; addition differs only by the
Witt carry  delta(a, c) = Frob^{-1}(-sum_{0<i<p} binom(p, i)/p * a^i c^(p-i)),
which is identically zero for the ramified kind.

Elements are coded as the integer a + Q*b (Q = residue field size).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache
from math import comb

import numpy as np

from .fields import GF, Tables, gf

RING_TABLE_LIMIT = 729


class RingKind(str, Enum):
    UNRAMIFIED = "unramified"
    RAMIFIED = "ramified"


@dataclass(frozen=True)
class RingSpec:
    """A length-two ring with residue field F_{p^m}.

    With ``ext`` set, the ring is the unramified quadratic extension (residue
    field F_{q^2}) carrying the involution sigma.
    """

    kind: RingKind
    p: int
    m: int = 1
    ext: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", RingKind(self.kind))
        if self.p == 2 or self.p < 2:
            raise ValueError("residue characteristic must be an odd prime")
        if self.m < 1:
            raise ValueError("m must be >= 1")

    @property
    def q(self) -> int:
        """Size of the base residue field."""
        return self.p**self.m

    @property
    def residue_degree(self) -> int:
        return self.m * (2 if self.ext else 1)

    def base(self) -> "RingSpec":
        return RingSpec(self.kind, self.p, self.m, False)

    def with_ext(self) -> "RingSpec":
        return RingSpec(self.kind, self.p, self.m, True)

    def label(self) -> str:
        s = f"{self.kind.value}(p={self.p},m={self.m})"
        return s + "+ext" if self.ext else s


class LocalRing:
    """Arithmetic in a length-two local ring over a given residue field."""

    def __init__(self, kind: RingKind | str, field: GF, base_q: int | None = None):
        self.kind = RingKind(kind)
        self.F = field
        self.p = field.p
        self.Q = field.q
        self.size = self.Q * self.Q
        # size of the sigma-fixed residue field, when an involution exists
        self.base_q = base_q
        F = field
        self._binom = [(comb(self.p, i) // self.p) % self.p for i in range(self.p + 1)]
        self._carry_t = None
        if self.kind is RingKind.UNRAMIFIED and self.Q <= RING_TABLE_LIMIT:
            self._carry_t = [[self._carry(a, c) for c in range(self.Q)] for a in range(self.Q)]
        self.pi = self.Q  # code of (0, 1)
        self.one = 1
        self.zero = 0

    # -- coordinates -------------------------------------------------------
    def elem(self, a: int, b: int = 0) -> int:
        return a + self.Q * b

    def coords(self, x: int) -> tuple[int, int]:
        b, a = divmod(x, self.Q)
        return a, b

    def reduce(self, x: int) -> int:
        """Image in the residue field."""
        return x % self.Q

    def section(self, a: int) -> int:
        """Multiplicative section of reduction, with s(0) = 0."""
        return a

    def pi_times(self, a: int) -> int:
        """pi * s(a); depends only on a."""
        return self.Q * a

    def is_unit(self, x: int) -> bool:
        return x % self.Q != 0

    # -- arithmetic --------------------------------------------------------
    def _carry(self, a: int, c: int) -> int:
        F = self.F
        if a == 0 or c == 0:
            return 0
        t = 0
        for i in range(1, self.p):
            term = F.mul(F.pow(a, i), F.pow(c, self.p - i))
            t = F.add(t, F.mul(F.from_int(self._binom[i]), term))
        return F.frob_inv(F.neg(t))

    def carry(self, a: int, c: int) -> int:
        if self.kind is RingKind.RAMIFIED:
            return 0
        if self._carry_t is not None:
            return self._carry_t[a][c]
        return self._carry(a, c)

    def add(self, x: int, y: int) -> int:
        F, Q = self.F, self.Q
        b, a = divmod(x, Q)
        d, c = divmod(y, Q)
        hi = F.add(b, d)
        if self.kind is RingKind.UNRAMIFIED and a and c:
            hi = F.add(hi, self.carry(a, c))
        return F.add(a, c) + Q * hi

    def neg(self, x: int) -> int:
        b, a = divmod(x, self.Q)
        return self.F.neg(a) + self.Q * self.F.neg(b)

    def sub(self, x: int, y: int) -> int:
        return self.add(x, self.neg(y))

    def mul(self, x: int, y: int) -> int:
        F, Q = self.F, self.Q
        b, a = divmod(x, Q)
        d, c = divmod(y, Q)
        return F.mul(a, c) + Q * F.add(F.mul(a, d), F.mul(b, c))

    def inv(self, x: int) -> int:
        b, a = divmod(x, self.Q)
        if a == 0:
            raise ZeroDivisionError("not a unit")
        F = self.F
        ai = F.inv(a)
        return ai + self.Q * F.neg(F.mul(b, F.mul(ai, ai)))

    def pow(self, x: int, k: int) -> int:
        r = 1
        while k:
            if k & 1:
                r = self.mul(r, x)
            x = self.mul(x, x)
            k >>= 1
        return r

    def from_int(self, n: int) -> int:
        """Image of the integer n."""
        r, x = 0, 1
        n %= self.p * self.p
        while n:
            if n & 1:
                r = self.add(r, x)
            x = self.add(x, x)
            n >>= 1
        return r

    def unit_decompose(self, u: int) -> tuple[int, int]:
        """Split a unit as s(a) * (1 + pi c); returns the two factors as codes."""
        a, b = self.coords(u)
        if a == 0:
            raise ValueError("unit_decompose needs a unit")
        c = self.F.div(b, a)
        return a, 1 + self.Q * c

    def principal_part(self, u: int) -> int:
        """The c in u = s(a)(1 + pi c)."""
        a, b = self.coords(u)
        if a == 0:
            raise ValueError("not a unit")
        return self.F.div(b, a)

    def sigma(self, x: int) -> int:
        """The involution of the quadratic extension: coordinatewise x -> x^q."""
        if self.base_q is None:
            raise ValueError("ring has no quadratic-extension involution")
        a, b = self.coords(x)
        return self.F.pow(a, self.base_q) + self.Q * self.F.pow(b, self.base_q)

    # -- integer model for Z/p^2 -------------------------------------------
    def to_int(self, x: int) -> int:
        """Integer in [0, p^2) for the unramified ring with prime residue field."""
        if self.kind is not RingKind.UNRAMIFIED or self.F.m != 1:
            raise ValueError("integer model only for Z/p^2")
        a, b = self.coords(x)
        p = self.p
        return (pow(a, p, p * p) + p * b) % (p * p)

    # -- tables --------------------------------------------------------------
    @cached_property
    def tables(self) -> Tables:
        if self.size > RING_TABLE_LIMIT:
            raise ValueError(f"ring of size {self.size} too large for lookup tables")
        ft = self.F.tables()
        Q = self.Q
        codes = np.arange(self.size)
        a, b = codes % Q, codes // Q
        A, C = a[:, None], a[None, :]
        B, D = b[:, None], b[None, :]
        hi = ft.add[B, D]
        if self.kind is RingKind.UNRAMIFIED:
            carry = np.array(self._carry_t, dtype=np.int64)
            hi = ft.add[hi, carry[A, C]]
        add = ft.add[A, C] + Q * hi
        mul = ft.mul[A, C] + Q * ft.add[ft.mul[A, D], ft.mul[B, C]]
        neg = ft.neg[a] + Q * ft.neg[b]
        inv = np.full(self.size, -1, dtype=np.int64)
        for x in range(self.size):
            if x % Q:
                inv[x] = self.inv(x)
        return Tables(self.size, add, mul, neg, inv)

    @cached_property
    def sigma_array(self) -> np.ndarray:
        return np.array([self.sigma(x) for x in range(self.size)], dtype=np.int64)

    def __repr__(self) -> str:
        return f"LocalRing({self.kind.value}, {self.F})"


@lru_cache(maxsize=None)
def local_ring(kind: RingKind | str, p: int, m: int = 1, base_q: int | None = None) -> LocalRing:
    return LocalRing(RingKind(kind), gf(p, m), base_q)


def make_ring(spec: RingSpec) -> LocalRing:
    """Ring for a spec; with ``ext`` the residue field is F_{q^2} and sigma is set."""
    if spec.ext:
        return local_ring(spec.kind, spec.p, 2 * spec.m, spec.q)
    return local_ring(spec.kind, spec.p, spec.m)


def ring_embedding(small: LocalRing, big: LocalRing) -> list[int]:
    """Coordinatewise extension of the residue-field embedding to the rings."""
    from .fields import embedding

    if small.kind is not big.kind:
        raise ValueError("ring kinds differ")
    e = embedding(small.F, big.F)
    Q, QQ = small.Q, big.Q
    return [e[x % Q] + QQ * e[x // Q] for x in range(small.size)]


class AdditiveCharacter:
    """psi: F -> mu_p stored as the exponent map a -> c.a in Z/p.

    For the residue field of a ring the default psi is the absolute trace;
    on an extension field, ``scale`` is an element of relative trace 1 so the
    character restricts to the base psi.
    """

    def __init__(self, field: GF, scale: int = 1):
        self.F = field
        self.scale = scale

    def __call__(self, a: int) -> int:
        return self.F.trace(self.F.mul(self.scale, a))
