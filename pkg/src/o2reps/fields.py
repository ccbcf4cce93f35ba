"""Finite fields GF(p^m) with integer-coded elements.

An element sum(d_i x^i) is coded as the integer sum(d_i p^i), so the code
order is lexicographic in the polynomial basis (highest degree first).  The
defining polynomial is the least monic primitive polynomial of degree m,
where polynomials x^m + c_{m-1} x^{m-1} + ... + c_0 are ordered by the
integer sum(c_i p^i).  This makes every table bit-for-bit reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# fields up to this size get full Python/numpy addition and multiplication tables
TABLE_LIMIT = 729


@dataclass(frozen=True)
class Tables:
    """Numpy lookup tables used by the batched matrix routines."""

    size: int
    add: np.ndarray
    mul: np.ndarray
    neg: np.ndarray
    inv: np.ndarray  # -1 marks non-units


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _digits(code: int, p: int, m: int) -> list[int]:
    out = []
    for _ in range(m):
        code, d = divmod(code, p)
        out.append(d)
    return out


def _code(digits, p: int) -> int:
    c = 0
    for d in reversed(digits):
        c = c * p + d
    return c


def _power_table(low: tuple[int, ...], p: int, m: int) -> list[int] | None:
    """Codes of x^0, x^1, ... modulo x^m + low; None if x is not primitive."""
    q = p**m
    v = [1] + [0] * (m - 1)
    out = []
    seen = set()
    for _ in range(q - 1):
        c = _code(v, p)
        if c in seen:
            return None
        seen.add(c)
        out.append(c)
        top = v[-1]
        v = [0] + v[:-1]
        if top:
            v = [(v[i] - top * low[i]) % p for i in range(m)]
    if _code(v, p) != 1:
        return None
    return out


def primitive_modulus(p: int, m: int) -> tuple[int, ...]:
    """Lower coefficients (c_0, ..., c_{m-1}) of the least primitive polynomial."""
    for n in range(1, p**m):
        low = tuple(_digits(n, p, m))
        if low[0] == 0:
            continue
        if _power_table(low, p, m) is not None:
            return low
    raise ValueError(f"no primitive polynomial of degree {m} over F_{p}")


class GF:
    """The field with p^m elements.  Use :func:`gf` for a cached instance."""

    def __init__(self, p: int, m: int = 1):
        if not is_prime(p):
            raise ValueError(f"p={p} is not prime")
        if m < 1:
            raise ValueError("m must be >= 1")
        self.p = p
        self.m = m
        self.q = p**m
        self.modulus = primitive_modulus(p, m)
        q = self.q
        self.exp = _power_table(self.modulus, p, m)
        self.log = [-1] * q
        for k, c in enumerate(self.exp):
            self.log[c] = k
        self.digits = [_digits(c, p, m) for c in range(q)]
        self._neg = [_code([(-d) % p for d in self.digits[c]], p) for c in range(q)]
        # Zech logarithms: 1 + x^k = x^zech[k]  (-1 when the sum is zero)
        self.zech = []
        for k in range(q - 1):
            d = list(self.digits[self.exp[k]])
            d[0] = (d[0] + 1) % p
            self.zech.append(self.log[_code(d, p)])
        self._add_t = self._mul_t = None
        if q <= TABLE_LIMIT:
            dg = np.array(self.digits, dtype=np.int64).reshape(q, m)
            w = p ** np.arange(m, dtype=np.int64)
            add = ((dg[:, None, :] + dg[None, :, :]) % p) @ w
            lg = np.array(self.log, dtype=np.int64)
            ex = np.array(self.exp, dtype=np.int64)
            mul = ex[(lg[:, None] + lg[None, :]) % (q - 1)]
            mul[0, :] = 0
            mul[:, 0] = 0
            self._add_np, self._mul_np = add, mul
            self._add_t = add.tolist()
            self._mul_t = mul.tolist()
        self._trace = [self._abs_trace(c) for c in range(q)]

    # -- scalar arithmetic -------------------------------------------------
    def add(self, a: int, b: int) -> int:
        if self._add_t is not None:
            return self._add_t[a][b]
        if a == 0:
            return b
        if b == 0:
            return a
        la = self.log[a]
        z = self.zech[(self.log[b] - la) % (self.q - 1)]
        if z < 0:
            return 0
        return self.exp[(la + z) % (self.q - 1)]

    def neg(self, a: int) -> int:
        return self._neg[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self._neg[b])

    def mul(self, a: int, b: int) -> int:
        if self._mul_t is not None:
            return self._mul_t[a][b]
        if a == 0 or b == 0:
            return 0
        return self.exp[(self.log[a] + self.log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in GF")
        return self.exp[(-self.log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            return 1 if k == 0 else 0
        return self.exp[(self.log[a] * k) % (self.q - 1)]

    def frob(self, a: int, k: int = 1) -> int:
        """a^(p^k)."""
        return self.pow(a, self.p**k)

    def frob_inv(self, a: int) -> int:
        return self.pow(a, self.q // self.p)

    def from_int(self, n: int) -> int:
        """Image of the integer n (prime subfield)."""
        return n % self.p

    def elem(self, digits) -> int:
        return _code([d % self.p for d in digits], self.p)

    @property
    def generator(self) -> int:
        return self.exp[1 % (self.q - 1)] if self.q > 2 else 1

    def _abs_trace(self, a: int) -> int:
        t, x = 0, a
        for _ in range(self.m):
            t = self.add(t, x)
            x = self.pow(x, self.p)
        assert t < self.p, "trace must land in the prime field"
        return t

    def trace(self, a: int) -> int:
        """Absolute trace Tr_{F_q/F_p}(a) as an integer in [0, p)."""
        return self._trace[a]

    def sum(self, xs) -> int:
        t = 0
        for x in xs:
            t = self.add(t, x)
        return t

    def tables(self) -> Tables:
        if self._add_t is None:
            raise ValueError(f"GF({self.q}) is too large for lookup tables")
        inv = np.array([-1] + [self.inv(a) for a in range(1, self.q)], dtype=np.int64)
        neg = np.array(self._neg, dtype=np.int64)
        return Tables(self.q, self._add_np, self._mul_np, neg, inv)

    def trace_array(self) -> np.ndarray:
        return np.array(self._trace, dtype=np.int64)

    def digit_array(self) -> np.ndarray:
        return np.array(self.digits, dtype=np.int64).reshape(self.q, self.m)

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.m})"


@lru_cache(maxsize=None)
def gf(p: int, m: int = 1) -> GF:
    return GF(p, m)


@lru_cache(maxsize=None)
def embedding(small: GF, big: GF) -> tuple[int, ...]:
    """Codes of the images of small's elements under a fixed embedding into big.

    The generator x of small maps to the least root (by code) of small's
    defining polynomial in big.
    """
    if small.p != big.p or big.m % small.m:
        raise ValueError(f"{small} does not embed in {big}")
    if small.m == 1:
        return tuple(range(small.q))
    low = small.modulus
    alpha = None
    for z in range(1, big.q):
        v = big.pow(z, small.m)
        for i, c in enumerate(low):
            v = big.add(v, big.mul(c, big.pow(z, i)))
        if v == 0:
            alpha = z
            break
    assert alpha is not None
    powers = [big.pow(alpha, i) for i in range(small.m)]
    out = []
    for c in range(small.q):
        v = 0
        for i, d in enumerate(small.digits[c]):
            v = big.add(v, big.mul(d, powers[i]))
        out.append(v)
    return tuple(out)


def relative_trace(big: GF, small: GF, y: int) -> int:
    """Tr_{big/small}(y), returned as a code of big."""
    k = big.m // small.m
    t, x = 0, y
    for _ in range(k):
        t = big.add(t, x)
        x = big.pow(x, small.q)
    return t


@lru_cache(maxsize=None)
def trace_one_element(big: GF, small: GF) -> int:
    """Least element of big whose relative trace down to small is 1."""
    for c in range(big.q):
        if relative_trace(big, small, c) == 1:
            return c
    raise AssertionError("relative trace is surjective")
