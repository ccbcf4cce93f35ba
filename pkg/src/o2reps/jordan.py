"""Small-matrix linear algebra over GF(q) and Jordan forms.

These routines work element by element on nested lists and are meant for
matrices of size <= 6; the batched numpy versions live in :mod:`matspace`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product
from math import lcm

import numpy as np

from .fields import GF, embedding, gf
from .matspace import _perm_sign

# largest splitting field used for Jordan forms (ring tables need Q^2 <= 729)
MAX_SPLIT_FIELD = 27


# -- polynomials over GF, coefficient lists low -> high -------------------------

def poly_trim(f: list[int]) -> list[int]:
    f = list(f)
    while len(f) > 1 and f[-1] == 0:
        f.pop()
    return f


def poly_mul(F: GF, f: list[int], g: list[int]) -> list[int]:
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a == 0:
            continue
        for j, b in enumerate(g):
            out[i + j] = F.add(out[i + j], F.mul(a, b))
    return poly_trim(out)


def poly_add(F: GF, f: list[int], g: list[int]) -> list[int]:
    n = max(len(f), len(g))
    f = f + [0] * (n - len(f))
    g = g + [0] * (n - len(g))
    return poly_trim([F.add(a, b) for a, b in zip(f, g)])


def poly_divmod(F: GF, f: list[int], g: list[int]) -> tuple[list[int], list[int]]:
    f = poly_trim(f)
    g = poly_trim(g)
    if g == [0]:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(f)
    dg = len(g) - 1
    lead_inv = F.inv(g[-1])
    qt = [0] * max(1, len(f) - dg)
    while len(r) - 1 >= dg and r != [0]:
        shift = len(r) - 1 - dg
        c = F.mul(r[-1], lead_inv)
        qt[shift] = c
        for i, b in enumerate(g):
            r[i + shift] = F.sub(r[i + shift], F.mul(c, b))
        r = poly_trim(r)
        if len(r) - 1 < dg:
            break
    return poly_trim(qt), r


def poly_eval(F: GF, f: list[int], x: int) -> int:
    v = 0
    for c in reversed(f):
        v = F.add(F.mul(v, x), c)
    return v


def charpoly(F: GF, A) -> list[int]:
    """det(xI - A) by Leibniz expansion over polynomial entries."""
    n = len(A)
    ent = [[[F.neg(A[i][j])] for j in range(n)] for i in range(n)]
    for i in range(n):
        ent[i][i] = [F.neg(A[i][i]), 1]
    total = [0]
    for perm in permutations(range(n)):
        term = [1]
        for i in range(n):
            term = poly_mul(F, term, poly_trim(ent[i][perm[i]]))
            if term == [0]:
                break
        if term == [0]:
            continue
        if _perm_sign(perm) < 0:
            term = [F.neg(c) for c in term]
        total = poly_add(F, total, term)
    return total


def _monic_polys(F: GF, d: int):
    for low in product(range(F.q), repeat=d):
        yield list(low) + [1]


def factor_poly(F: GF, f: list[int]) -> list[tuple[tuple[int, ...], int]]:
    """Factorization of a monic polynomial into monic irreducibles, by trial division.

    Returns sorted (factor, multiplicity) pairs.  Fine for degree <= 6 and q <= 27.
    """
    f = poly_trim(f)
    out: dict[tuple[int, ...], int] = {}
    d = 1
    while len(f) - 1 >= 2 * d:
        for g in _monic_polys(F, d):
            while True:
                qt, r = poly_divmod(F, f, g)
                if r != [0]:
                    break
                out[tuple(g)] = out.get(tuple(g), 0) + 1
                f = qt
        d += 1
    if len(f) > 1:
        out[tuple(f)] = out.get(tuple(f), 0) + 1
    return sorted(out.items(), key=lambda t: (len(t[0]), t[0]))


# -- dense linear algebra over GF ------------------------------------------------

def mat_mul(F: GF, A, B):
    n, k, m = len(A), len(B), len(B[0])
    return [[F.sum(F.mul(A[i][t], B[t][j]) for t in range(k)) for j in range(m)] for i in range(n)]


def rref(F: GF, M):
    A = [list(r) for r in M]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    piv = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        i = next((i for i in range(r, rows) if A[i][c]), None)
        if i is None:
            continue
        A[r], A[i] = A[i], A[r]
        inv = F.inv(A[r][c])
        A[r] = [F.mul(inv, a) for a in A[r]]
        for i in range(rows):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [F.sub(a, F.mul(f, b)) for a, b in zip(A[i], A[r])]
        piv.append(c)
        r += 1
    return A, piv


def rank(F: GF, M) -> int:
    return len(rref(F, M)[1]) if M else 0


def nullspace(F: GF, M, ncols: int | None = None):
    """Row basis of {v : M v = 0}."""
    if not M:
        n = ncols
        return [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    n = len(M[0])
    R, piv = rref(F, M)
    free = [c for c in range(n) if c not in piv]
    out = []
    for f in free:
        v = [0] * n
        v[f] = 1
        for i, c in enumerate(piv):
            v[c] = F.neg(R[i][f])
        out.append(v)
    return out


def inverse(F: GF, A):
    n = len(A)
    aug = [list(A[i]) + [1 if i == j else 0 for j in range(n)] for i in range(n)]
    R, piv = rref(F, aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in R]


def det(F: GF, A) -> int:
    n = len(A)
    A = [list(r) for r in A]
    d = 1
    for c in range(n):
        i = next((i for i in range(c, n) if A[i][c]), None)
        if i is None:
            return 0
        if i != c:
            A[c], A[i] = A[i], A[c]
            d = F.neg(d)
        d = F.mul(d, A[c][c])
        inv = F.inv(A[c][c])
        for i in range(c + 1, n):
            if A[i][c]:
                f = F.mul(A[i][c], inv)
                A[i] = [F.sub(a, F.mul(f, b)) for a, b in zip(A[i], A[c])]
    return d


def _sub_scalar(F: GF, A, lam):
    n = len(A)
    return [[F.sub(A[i][j], lam) if i == j else A[i][j] for j in range(n)] for i in range(n)]


def _mat_vec(F: GF, A, v):
    return [F.sum(F.mul(A[i][j], v[j]) for j in range(len(v))) for i in range(len(A))]


# -- Jordan forms ----------------------------------------------------------------

@dataclass
class SplitFailure:
    """The characteristic polynomial does not split in any allowed field."""

    charpoly: list[int]
    factors: list[tuple[tuple[int, ...], int]]
    splitting_degree: int


@dataclass
class JordanData:
    """P^-1 A P = J over the splitting field ``field``.

    ``eigen`` lists (eigenvalue, block sizes) in the order the blocks appear.
    ``cycles`` and ``step`` are filled in by :func:`arrange_cycles`.
    """

    base: GF
    field: GF
    eigen: list[tuple[int, tuple[int, ...]]]
    P: list[list[int]]
    chains: dict[int, list[list[int]]]  # eigenvalue -> columns of P in order
    cycles: list[list[int]] = field(default_factory=list)
    step: int | None = None

    @property
    def n(self) -> int:
        return len(self.P)

    @property
    def degree(self) -> int:
        return self.field.m // self.base.m

    @property
    def J(self):
        F, n = self.field, self.n
        J = [[0] * n for _ in range(n)]
        k = 0
        for lam, sizes in self.eigen:
            for s in sizes:
                for i in range(s):
                    J[k + i][k + i] = lam
                    if i + 1 < s:
                        J[k + i][k + i + 1] = 1
                k += s
        return J

    def eigen_slices(self) -> list[tuple[int, slice]]:
        """(eigenvalue, index range) for each generalized eigenspace block A_ij."""
        out, k = [], 0
        for lam, sizes in self.eigen:
            out.append((lam, slice(k, k + sum(sizes))))
            k += sum(sizes)
        return out

    def spectrum(self) -> dict[int, tuple[int, ...]]:
        return dict(self.eigen)


def splitting_degree(F: GF, factors) -> int:
    return lcm(*[len(f) - 1 for f, _ in factors]) if factors else 1


def _jordan_chains(F: GF, A, lam: int, mult: int):
    """Columns of a Jordan basis for the eigenvalue lam, blocks by decreasing size."""
    n = len(A)
    N = _sub_scalar(F, A, lam)
    kernels = [[]]  # kernels[j] = row basis of ker N^j
    Npow = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    while True:
        Npow = mat_mul(F, N, Npow)
        K = nullspace(F, Npow)
        kernels.append(K)
        if len(K) == mult:
            break
        if len(kernels) > n + 1:
            raise AssertionError("generalized eigenspace size mismatch")
    top = len(kernels) - 1
    chains: list[list[list[int]]] = []
    for j in range(top, 0, -1):
        # span of ker N^{j-1} plus images of existing chains at level j
        span = [list(v) for v in kernels[j - 1]]
        for ch in chains:
            if len(ch) >= j:
                span.append(ch[j - 1])
        for v in kernels[j]:
            if rank(F, span + [v]) > rank(F, span):
                chain = [v]
                for _ in range(j - 1):
                    chain.insert(0, _mat_vec(F, N, chain[0]))
                chains.append(chain)
                span.append(v)
    chains.sort(key=len, reverse=True)
    sizes = tuple(len(c) for c in chains)
    cols = [v for c in chains for v in c]
    return sizes, cols


def jordan_form(A, F: GF, max_field: int = MAX_SPLIT_FIELD) -> JordanData | SplitFailure:
    """Jordan form of a square matrix over F (nested list or array of codes)."""
    A = [[int(a) for a in row] for row in np.asarray(A)]
    n = len(A)
    cp = charpoly(F, A)
    factors = factor_poly(F, cp)
    k = splitting_degree(F, factors)
    if F.q**k > max_field:
        return SplitFailure(cp, factors, k)
    big = gf(F.p, F.m * k)
    e = embedding(F, big)
    Ab = [[e[a] for a in row] for row in A]
    mult: dict[int, int] = {}
    for fac, mlt in factors:
        fb = [e[c] for c in fac]
        roots = [z for z in range(big.q) if poly_eval(big, fb, z) == 0]
        if len(roots) != len(fac) - 1:
            raise AssertionError("factor does not split in the splitting field")
        for z in roots:
            mult[z] = mult.get(z, 0) + mlt
    eigen, chains = [], {}
    for lam in sorted(mult):
        sizes, cols = _jordan_chains(big, Ab, lam, mult[lam])
        eigen.append((lam, sizes))
        chains[lam] = cols
    P = _assemble(eigen, chains, n)
    jd = JordanData(F, big, eigen, P, chains)
    _check(jd, Ab)
    return jd


def _assemble(eigen, chains, n):
    cols = [v for lam, _ in eigen for v in chains[lam]]
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def _check(jd: JordanData, Ab):
    F = jd.field
    lhs = mat_mul(F, Ab, jd.P)
    rhs = mat_mul(F, jd.P, jd.J)
    if lhs != rhs:
        raise AssertionError("Jordan basis check failed")


def shift_class(jd: JordanData, x: int) -> bool:
    """Whether A is conjugate to A + xI (x a code of the base field)."""
    F = jd.field
    xb = embedding(jd.base, F)[x]
    spec = jd.spectrum()
    shifted = {F.add(lam, xb): s for lam, s in spec.items()}
    return shifted == spec


def shift_group(jd: JordanData) -> list[int]:
    """X_A = {x in base field : A ~ A + xI}, sorted by code."""
    return [x for x in range(jd.base.q) if shift_class(jd, x)]


def arrange_cycles(jd: JordanData, x: int) -> JordanData:
    """Reorder the eigenvalues into cycles a, a+x, ..., a+(p-1)x.

    Cycles are sorted by their least eigenvalue (by code) and start there.
    """
    F = jd.field
    if x == 0:
        raise ValueError("step must be nonzero")
    xb = embedding(jd.base, F)[x]
    spec = jd.spectrum()
    left = set(spec)
    cycles = []
    while left:
        a = min(left)
        cyc = [a]
        b = F.add(a, xb)
        while b != a:
            if b not in left:
                raise ValueError("matrix is not conjugate to its shift by the given step")
            cyc.append(b)
            b = F.add(b, xb)
        for c in cyc:
            if spec[c] != spec[a]:
                raise ValueError("block structures differ inside an eigenvalue cycle")
            left.discard(c)
        cycles.append(cyc)
    eigen = [(lam, spec[lam]) for cyc in cycles for lam in cyc]
    P = _assemble(eigen, jd.chains, jd.n)
    return JordanData(jd.base, F, eigen, P, jd.chains, cycles, x)
