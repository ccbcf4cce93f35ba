"""Matrices over table-driven rings and fields, Lie spaces, trace form, radical.

Batched routines act on int64 arrays of element codes with shape (..., n, n)
and look every operation up in a :class:`~o2reps.fields.Tables`.  Codes 0 and
1 are the zero and identity of every algebra used here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from itertools import permutations

import numpy as np

from . import modp
from .fields import GF, Tables


class Family(str, Enum):
    SL = "sl"
    SP = "sp"
    O = "o"
    U = "u"


# -- batched arithmetic -------------------------------------------------------

def identity(n: int, batch: tuple[int, ...] = ()) -> np.ndarray:
    return np.broadcast_to(np.eye(n, dtype=np.int64), batch + (n, n)).copy()


def mat_mul(T: Tables, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    prod = T.mul[A[..., :, :, None], B[..., None, :, :]]
    acc = prod[..., :, 0, :]
    for k in range(1, A.shape[-1]):
        acc = T.add[acc, prod[..., :, k, :]]
    return acc


def mat_add(T: Tables, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return T.add[A, B]


def mat_sub(T: Tables, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return T.add[A, T.neg[B]]


def transpose(A: np.ndarray) -> np.ndarray:
    return np.swapaxes(A, -1, -2)


def _perm_sign(perm) -> int:
    s, seen = 1, set()
    for i in range(len(perm)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        if length % 2 == 0:
            s = -s
    return s


def det(T: Tables, A: np.ndarray) -> np.ndarray:
    """Leibniz expansion, fine for the n <= 4 used here."""
    n = A.shape[-1]
    total = np.zeros(A.shape[:-2], dtype=np.int64)
    for perm in permutations(range(n)):
        term = A[..., 0, perm[0]]
        for i in range(1, n):
            term = T.mul[term, A[..., i, perm[i]]]
        if _perm_sign(perm) < 0:
            term = T.neg[term]
        total = T.add[total, term]
    return total


def adjugate(T: Tables, A: np.ndarray) -> np.ndarray:
    n = A.shape[-1]
    if n == 1:
        return np.ones_like(A)
    out = np.empty_like(A)
    idx = list(range(n))
    for i in range(n):
        for j in range(n):
            rows = [r for r in idx if r != j]
            cols = [c for c in idx if c != i]
            minor = A[..., rows, :][..., :, cols]
            c = det(T, minor)
            out[..., i, j] = c if (i + j) % 2 == 0 else T.neg[c]
    return out


def inverse(T: Tables, A: np.ndarray) -> np.ndarray:
    d = det(T, A)
    dinv = T.inv[d]
    if np.any(dinv < 0):
        raise ZeroDivisionError("matrix not invertible")
    return T.mul[dinv[..., None, None], adjugate(T, A)]


def trace(T: Tables, A: np.ndarray) -> np.ndarray:
    n = A.shape[-1]
    t = A[..., 0, 0]
    for i in range(1, n):
        t = T.add[t, A[..., i, i]]
    return t


def trace_form(T: Tables, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """tr(AB), batched over leading axes."""
    n = A.shape[-1]
    prod = T.mul[A, transpose(B)]
    flat = prod.reshape(prod.shape[:-2] + (n * n,))
    t = flat[..., 0]
    for k in range(1, n * n):
        t = T.add[t, flat[..., k]]
    return t


def encode(A: np.ndarray, base: int) -> np.ndarray:
    """Row-major base-``base`` keys, first entry most significant."""
    n = A.shape[-1]
    if base ** (n * n) >= 2**63:
        raise OverflowError("matrix keys do not fit in int64")
    flat = A.reshape(A.shape[:-2] + (n * n,)).astype(np.int64)
    key = np.zeros(A.shape[:-2], dtype=np.int64)
    for k in range(n * n):
        key = key * base + flat[..., k]
    return key


def decode(keys: np.ndarray, base: int, n: int) -> np.ndarray:
    keys = np.array(keys, dtype=np.int64)
    out = np.empty(keys.shape + (n * n,), dtype=np.int64)
    for k in range(n * n - 1, -1, -1):
        keys, out[..., k] = np.divmod(keys, base)
    return out.reshape(keys.shape + (n, n))


def symplectic_form(F_neg_one: int, n: int) -> np.ndarray:
    """J = [[0, I], [-I, 0]] of size 2n, in field/ring codes."""
    J = np.zeros((2 * n, 2 * n), dtype=np.int64)
    for i in range(n):
        J[i, n + i] = 1
        J[n + i, i] = F_neg_one
    return J


def scalar_matrix(n: int, x: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64) * x


# -- F_p-linear structure of matrix spaces ------------------------------------

def to_digits(F: GF, A: np.ndarray) -> np.ndarray:
    """Flatten field matrices to F_p vectors of length n*n*m."""
    dg = F.digit_array()[A]
    return dg.reshape(A.shape[:-2] + (-1,))


def from_digits(F: GF, v: np.ndarray, n: int) -> np.ndarray:
    v = np.asarray(v, dtype=np.int64).reshape(v.shape[:-1] + (n * n, F.m))
    w = F.p ** np.arange(F.m, dtype=np.int64)
    return (v @ w).reshape(v.shape[:-2] + (n, n))


def _condition(family: Family, F: GF, X: np.ndarray, base_q: int | None) -> np.ndarray:
    """Defining linear map of the Lie space; its kernel is M_C."""
    T = F.tables()
    if family is Family.SL:
        return trace(T, X)[..., None, None]
    if family is Family.O:
        return T.add[X, transpose(X)]
    if family is Family.U:
        sig = np.array([F.pow(a, base_q) for a in range(F.q)], dtype=np.int64)
        return T.add[X, transpose(sig[X])]
    if family is Family.SP:
        N = X.shape[-1]
        J = symplectic_form(F.neg(1), N // 2)
        return T.add[mat_mul(T, transpose(X), J), mat_mul(T, J, X)]
    raise ValueError(f"unsupported family {family}")


@dataclass
class LieSpace:
    """M_C inside M_N(F), as an F_p-space with an explicit basis."""

    family: Family
    n: int
    N: int
    F: GF
    basis: np.ndarray  # (d, N, N) field codes
    base_q: int | None = None
    _vecs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self._vecs = to_digits(self.F, self.basis) if len(self.basis) else np.zeros(
            (0, self.N * self.N * self.F.m), dtype=np.int64
        )

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def size(self) -> int:
        return self.F.p**self.dim

    @cached_property
    def _coord_data(self):
        return modp.solve_coordinates(self._vecs, self.F.p)

    def coords(self, X: np.ndarray) -> np.ndarray:
        """F_p coordinates of members of the space (batched)."""
        piv, Tinv = self._coord_data
        v = to_digits(self.F, X)[..., piv]
        return (v @ Tinv) % self.F.p

    def combine(self, c: np.ndarray) -> np.ndarray:
        """Matrices with F_p coordinates c (batched over leading axes)."""
        v = (np.asarray(c, dtype=np.int64) @ self._vecs) % self.F.p
        return from_digits(self.F, v, self.N)

    def elements(self) -> np.ndarray:
        """All p^dim members, element i having coordinates = base-p digits of i."""
        p, d = self.F.p, self.dim
        idx = np.arange(p**d, dtype=np.int64)
        c = (idx[:, None] // p ** np.arange(d, dtype=np.int64)) % p
        return self.combine(c)

    def contains(self, X: np.ndarray) -> np.ndarray:
        c = _condition(self.family, self.F, X, self.base_q)
        return ~np.any(c.reshape(c.shape[:-2] + (-1,)) != 0, axis=-1)

    def gram(self, scale: int = 1) -> np.ndarray:
        """Gram matrix of (A, B) -> AbsTr(scale * tr(AB)) on the basis."""
        T = self.F.tables()
        tf = trace_form(T, self.basis[:, None], self.basis[None, :])
        tf = T.mul[scale, tf]
        return self.F.trace_array()[tf]


def lie_space(family: Family | str, n: int, F: GF, base_q: int | None = None) -> LieSpace:
    """M_C for the family; for Sp, ``n`` is the half-size (matrices are 2n x 2n)."""
    family = Family(family)
    if family is Family.U and base_q is None:
        raise ValueError("unitary Lie space needs the base field size")
    N = 2 * n if family is Family.SP else n
    p, m = F.p, F.m
    dimv = N * N * m
    eye = np.eye(dimv, dtype=np.int64)
    E = from_digits(F, eye, N)
    cond = _condition(family, F, E, base_q)
    C = to_digits(F, cond.reshape((dimv,) + cond.shape[-2:]))
    vecs = modp.nullspace(C.T, p)
    basis = from_digits(F, vecs, N) if len(vecs) else np.zeros((0, N, N), dtype=np.int64)
    return LieSpace(family, n, N, F, basis, base_q)


def full_space(n: int, F: GF) -> LieSpace:
    """M_N(F) itself, with the standard F_p basis."""
    dimv = n * n * F.m
    basis = from_digits(F, np.eye(dimv, dtype=np.int64), n)
    return LieSpace(Family.SL, n, n, F, basis)


def radical(L: LieSpace, scale: int = 1) -> np.ndarray:
    """Basis (as matrices) of {A in M_C : tr(AX) = 0 for all X in M_C}."""
    if L.dim == 0:
        return np.zeros((0, L.N, L.N), dtype=np.int64)
    ns = modp.nullspace(L.gram(scale), L.F.p)
    if len(ns) == 0:
        return np.zeros((0, L.N, L.N), dtype=np.int64)
    return L.combine(ns)
