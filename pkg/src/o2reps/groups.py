"""Classical groups over the residue field and over the length-two ring.

Groups are held as sorted arrays of matrices over a table-driven algebra
(either the residue field or the ring) together with their int64 keys, so
membership and products are numpy searchsorted/table lookups.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import matspace as ms
from .config import BUDGETS, BudgetExceeded
from .fields import GF, Tables
from .matspace import Family
from .rings import LocalRing, RingSpec, make_ring


@dataclass(frozen=True)
class GroupSpec:
    """C(O_2) for one classical family.  For Sp, ``n`` is the half-size."""

    family: Family
    n: int
    ring: RingSpec

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.n < 1:
            raise ValueError("n must be positive")
        want_ext = self.family is Family.U
        if self.ring.ext != want_ext:
            object.__setattr__(self, "ring", self.ring.with_ext() if want_ext else self.ring.base())

    @property
    def N(self) -> int:
        return 2 * self.n if self.family is Family.SP else self.n

    @property
    def p(self) -> int:
        return self.ring.p

    @property
    def q(self) -> int:
        return self.ring.q

    def local_ring(self) -> LocalRing:
        return make_ring(self.ring)

    def field(self) -> GF:
        return self.local_ring().F

    @property
    def base_q(self) -> int | None:
        return self.q if self.family is Family.U else None

    @property
    def scalar_classes(self) -> bool:
        """SL with p | n: kernel characters are parameterized by M_n / scalars."""
        return self.family is Family.SL and self.n % self.p == 0

    def label(self) -> str:
        return f"{self.family.value}{self.n}/{self.ring.kind.value}(p={self.p},m={self.ring.m})"


class FiniteGroup:
    """A finite matrix group stored as a sorted element table."""

    def __init__(self, T: Tables, N: int, elements: np.ndarray, name: str = ""):
        self.T = T
        self.N = N
        self.name = name
        keys = ms.encode(elements, T.size)
        order = np.argsort(keys, kind="stable")
        self.keys = keys[order]
        if len(self.keys) > 1 and np.any(self.keys[1:] == self.keys[:-1]):
            raise ValueError("duplicate elements in group table")
        self.elements = np.ascontiguousarray(elements[order])

    @property
    def order(self) -> int:
        return len(self.keys)

    def __len__(self) -> int:
        return self.order

    def locate(self, mats: np.ndarray) -> np.ndarray:
        """Indices of the given matrices, -1 where absent."""
        k = ms.encode(mats, self.T.size)
        pos = np.searchsorted(self.keys, k)
        pos = np.minimum(pos, len(self.keys) - 1)
        return np.where(self.keys[pos] == k, pos, -1)

    def index(self, mats: np.ndarray) -> np.ndarray:
        idx = self.locate(mats)
        if np.any(idx < 0):
            raise ValueError("matrix not in group")
        return idx

    @cached_property
    def identity(self) -> int:
        return int(self.index(ms.identity(self.N))[()])

    def mul(self, i, j) -> np.ndarray:
        return self.index(ms.mat_mul(self.T, self.elements[i], self.elements[j]))

    @cached_property
    def inverses(self) -> np.ndarray:
        return self.index(ms.inverse(self.T, self.elements))

    def conjugate_all(self, x: int) -> np.ndarray:
        """Indices of g x g^-1 for every g."""
        E = self.elements
        y = ms.mat_mul(self.T, ms.mat_mul(self.T, E, E[x][None]), E[self.inverses])
        return self.index(y)

    @cached_property
    def classes(self) -> "ClassData":
        class_of = np.full(self.order, -1, dtype=np.int64)
        reps, sizes = [], []
        for x in range(self.order):
            if class_of[x] >= 0:
                continue
            members = np.unique(self.conjugate_all(x))
            class_of[members] = len(reps)
            reps.append(x)
            sizes.append(len(members))
        return ClassData(class_of, reps, sizes)

    def is_abelian(self) -> bool:
        return all(size == 1 for size in self.classes.sizes)

    def subgroup(self, indices, name: str = "") -> "FiniteGroup":
        return FiniteGroup(self.T, self.N, self.elements[np.asarray(indices)], name)

    def closure(self, gens: list[int]) -> np.ndarray:
        """Indices of the subgroup generated by ``gens``."""
        seen = np.zeros(self.order, dtype=bool)
        seen[self.identity] = True
        frontier = np.array([self.identity])
        g = np.array(gens, dtype=np.int64)
        while len(frontier):
            prods = self.mul(np.repeat(frontier, len(g)), np.tile(g, len(frontier)))
            new = np.unique(prods[~seen[prods]])
            seen[new] = True
            frontier = new
        return np.nonzero(seen)[0]

    def generators(self, seed: int = 0) -> list[int]:
        """A small generating set, chosen greedily in a seeded random order."""
        rng = random.Random(seed)
        order = list(range(self.order))
        rng.shuffle(order)
        gens: list[int] = []
        inside = np.zeros(self.order, dtype=bool)
        inside[self.identity] = True
        count = 1
        for x in order:
            if count == self.order:
                break
            if inside[x]:
                continue
            gens.append(x)
            members = self.closure(gens)
            inside[members] = True
            count = len(members)
        return gens

    def exponent(self) -> int:
        from math import lcm

        e = 1
        for r in self.classes.reps:
            e = lcm(e, self.element_order(r))
        return e

    def element_order(self, x: int) -> int:
        k, y = 1, x
        while y != self.identity:
            y = int(self.mul(y, x)[()])
            k += 1
        return k


@dataclass
class ClassData:
    class_of: np.ndarray
    reps: list[int]
    sizes: list[int]

    @property
    def count(self) -> int:
        return len(self.reps)


# -- forms and membership -------------------------------------------------------

def _neg_one(T: Tables) -> int:
    return int(T.neg[1])


def form_matrix(spec: GroupSpec, T: Tables) -> np.ndarray:
    if spec.family is Family.SP:
        return ms.symplectic_form(_neg_one(T), spec.n)
    return ms.identity(spec.N)


def star(spec: GroupSpec, A: np.ndarray, over_ring: bool) -> np.ndarray:
    """Conjugate transpose for U (sigma entrywise), plain transpose otherwise."""
    if spec.family is not Family.U:
        return ms.transpose(A)
    R = spec.local_ring()
    if over_ring:
        sig = R.sigma_array
    else:
        F = R.F
        sig = np.array([F.pow(a, spec.q) for a in range(F.q)], dtype=np.int64)
    return ms.transpose(sig[A])


def is_member(spec: GroupSpec, A: np.ndarray, over_ring: bool) -> np.ndarray:
    """Batched membership test in C(O_2) (over_ring) or C(O_1)."""
    R = spec.local_ring()
    T = R.tables if over_ring else R.F.tables()
    if spec.family is Family.SL:
        return ms.det(T, A) == 1
    if spec.family is Family.SP:
        J = form_matrix(spec, T)
        lhs = ms.mat_mul(T, ms.mat_mul(T, ms.transpose(A), J), A)
        target = J
    else:
        lhs = ms.mat_mul(T, star(spec, A, over_ring), A)
        target = ms.identity(spec.N)
    return np.all((lhs == target).reshape(lhs.shape[:-2] + (-1,)), axis=-1)


# -- enumeration -----------------------------------------------------------------

def _all_matrices(Q: int, N: int) -> np.ndarray:
    count = Q ** (N * N)
    idx = np.arange(count, dtype=np.int64)
    return ms.decode(idx, Q, N)


def enumerate_residue_group(spec: GroupSpec, budget: int | None = None) -> FiniteGroup:
    """C(O_1) as an explicit element table."""
    budget = BUDGETS.scan if budget is None else budget
    F = spec.field()
    T = F.tables()
    N, Q = spec.N, F.q
    if spec.family is Family.SL:
        if Q ** (N * N) > budget:
            raise BudgetExceeded(f"SL scan of {Q}^{N * N} matrices exceeds budget {budget}")
        M = _all_matrices(Q, N)
        G = M[ms.det(T, M) == 1]
        return FiniteGroup(T, N, G, f"SL{N}(F{Q})")
    # column-by-column extension of partial isometries
    vecs = _all_vectors(Q, N)
    form = form_matrix(spec, T)
    if spec.family is Family.U:
        sig = np.array([F.pow(a, spec.q) for a in range(Q)], dtype=np.int64)
        left = sig[vecs]
    else:
        left = vecs
    # gram[u, v] = B(u, v) = left(u)^t . form . v
    fv = ms.mat_mul(T, form[None], vecs[..., None])[..., 0]
    prod = T.mul[left[:, None, :], fv[None, :, :]]
    gram = prod[..., 0]
    for k in range(1, N):
        gram = T.add[gram, prod[..., k]]
    diag = np.diagonal(gram)
    partial = np.zeros((1, 0), dtype=np.int64)
    for k in range(N):
        mask = np.broadcast_to(diag == form[k, k], (len(partial), len(vecs))).copy()
        for i in range(k):
            mask &= gram[partial[:, i], :] == form[i, k]
        rows, cols = np.nonzero(mask)
        if len(rows) > budget:
            raise BudgetExceeded(f"partial isometry search exceeds budget {budget}")
        partial = np.hstack([partial[rows], cols[:, None]])
    G = np.swapaxes(vecs[partial], -1, -2)  # columns are the chosen vectors
    G = G[is_member(spec, G, over_ring=False)]
    return FiniteGroup(T, N, G, f"{spec.family.value.upper()}{spec.n}(F{spec.q})")


def _all_vectors(Q: int, N: int) -> np.ndarray:
    idx = np.arange(Q**N, dtype=np.int64)
    out = np.empty((Q**N, N), dtype=np.int64)
    for k in range(N - 1, -1, -1):
        idx, out[:, k] = np.divmod(idx, Q)
    return out


def lift_elements(spec: GroupSpec, gbar: np.ndarray) -> np.ndarray:
    """Deterministic lifts of elements of C(O_1) to C(O_2) (batched).

    Start from the entrywise section and correct by a kernel element; this
    needs 2 to be invertible, i.e. p odd.
    """
    R = spec.local_ring()
    F = R.F
    TR, TF = R.tables, F.tables()
    Q = R.Q
    N = spec.N
    g0 = np.array(gbar, dtype=np.int64)  # section is the identity on codes
    half = F.inv(F.from_int(2))
    eye = ms.identity(N)
    if spec.family is Family.SL:
        d = ms.det(TR, g0)
        c = d // Q  # det(g0) = (1, c)
        corr = 1 + Q * TF.neg[c]  # (1 + pi c)^-1 = (1, -c)
        g = g0.copy()
        g[..., 0, :] = TR.mul[corr[..., None], g0[..., 0, :]]
    else:
        if spec.family is Family.SP:
            J = form_matrix(spec, TR)
            prod = ms.mat_mul(TR, ms.mat_mul(TR, ms.transpose(g0), J), g0)
            base = J
        else:
            prod = ms.mat_mul(TR, star(spec, g0, over_ring=True), g0)
            base = eye
        if np.any(prod % Q != base % Q):
            raise ValueError("input is not in C(O_1)")
        E = prod // Q
        if spec.family is Family.SP:
            Jf = form_matrix(spec, TF)
            Y = TF.mul[half, ms.mat_mul(TF, np.broadcast_to(Jf, E.shape), E)]
        else:
            Y = TF.mul[TF.neg[half], E]
        g = ms.mat_mul(TR, g0, eye + Q * Y)
    ok = is_member(spec, g, over_ring=True)
    if not np.all(ok):
        raise AssertionError("lift correction failed")
    return g


def kernel_elements(spec: GroupSpec, X: np.ndarray) -> np.ndarray:
    """I + pi X for residue matrices X (batched)."""
    Q = spec.local_ring().Q
    return ms.identity(spec.N, X.shape[:-2]) + Q * np.asarray(X, dtype=np.int64)


def reduce_mats(spec: GroupSpec, A: np.ndarray) -> np.ndarray:
    return np.asarray(A) % spec.local_ring().Q


def enumerate_group(spec: GroupSpec, residue: FiniteGroup | None = None, lie=None,
                    budget: int | None = None) -> FiniteGroup:
    """C(O_2) as lift(C(O_1)) x L(C)."""
    from .matspace import lie_space

    budget = BUDGETS.enumerate if budget is None else budget
    G1 = residue if residue is not None else enumerate_residue_group(spec)
    if lie is None:
        lie = lie_space(spec.family, spec.n, spec.field(), spec.base_q)
    total = G1.order * lie.size
    if total > budget:
        raise BudgetExceeded(f"|C(O_2)| = {total} exceeds enumeration budget {budget}")
    R = spec.local_ring()
    lifts = lift_elements(spec, G1.elements)
    kern = kernel_elements(spec, lie.elements())
    prods = ms.mat_mul(R.tables, lifts[:, None], kern[None, :]).reshape(-1, spec.N, spec.N)
    return FiniteGroup(R.tables, spec.N, prods, spec.label())


def count_kernel(spec: GroupSpec, lie, budget: int | None = None) -> int:
    """|L(C)| = #{X : I + pi X in C(O_2)}, by scan when affordable.

    Above the budget, every basis element's image is checked and the count
    is p^dim.
    """
    budget = BUDGETS.scan if budget is None else budget
    Q = spec.field().q
    N = spec.N
    if Q ** (N * N) <= budget:
        X = _all_matrices(Q, N)
        return int(np.count_nonzero(is_member(spec, kernel_elements(spec, X), over_ring=True)))
    if not np.all(is_member(spec, kernel_elements(spec, lie.basis), over_ring=True)):
        raise AssertionError("Lie space basis does not map into the kernel")
    return lie.size


def centralizer(G: FiniteGroup, A: np.ndarray, mode: str = "exact") -> np.ndarray:
    """Indices g with g A g^-1 = A (exact) or in A + scalars (scalar-class)."""
    T = G.T
    E = G.elements
    conj = ms.mat_mul(T, ms.mat_mul(T, E, np.asarray(A)[None]), E[G.inverses])
    diff = ms.mat_sub(T, conj, np.asarray(A)[None])
    if mode == "exact":
        ok = np.all(diff.reshape(len(E), -1) == 0, axis=1)
    elif mode == "scalar-class":
        N = G.N
        d0 = diff[:, 0, 0]
        off = diff.copy()
        off[:, np.arange(N), np.arange(N)] = 0
        ok = np.all(off.reshape(len(E), -1) == 0, axis=1)
        ok &= np.all(diff[:, np.arange(N), np.arange(N)] == d0[:, None], axis=1)
    else:
        raise ValueError(f"unknown centralizer mode {mode!r}")
    return np.nonzero(ok)[0]


def permutation_group(perms, p: int = 3, name: str = "") -> FiniteGroup:
    """The group generated by permutation matrices (small test groups such as C_3, S_3)."""
    from .fields import gf

    F = gf(p)
    T = F.tables()
    gens = []
    for perm in perms:
        n = len(perm)
        M = np.zeros((n, n), dtype=np.int64)
        M[list(perm), np.arange(n)] = 1
        gens.append(M)
    n = gens[0].shape[0]
    seen = {ms.encode(ms.identity(n), T.size).item(): ms.identity(n)}
    frontier = [ms.identity(n)]
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                x = ms.mat_mul(T, g, h)
                k = ms.encode(x, T.size).item()
                if k not in seen:
                    seen[k] = x
                    nxt.append(x)
        frontier = nxt
    return FiniteGroup(T, n, np.stack(list(seen.values())), name)
