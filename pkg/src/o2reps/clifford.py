"""Characters of the congruence kernel, their orbits, and irreducible dimensions.

L(C) = {I + pi X : X in M_C} is elementary abelian, so its characters are
exponent vectors c in F_p^d against a fixed F_p basis B_1..B_d of M_C:
psi_c(I + pi X) = zeta^(c . coords(X)).  C(O_1) acts through conjugation by
lifts; we compute that action at ring level, find orbits and stabilizers
there, and then compare with the parameter side, where psi_A has exponent
vector (Tr tr(A B_l))_l.  Each orbit contributes one irreducible of dimension
index * d for every irreducible degree d of its stabilizer.
"""

from __future__ import annotations

import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import matspace as ms
from .config import BUDGETS, BudgetExceeded, Budgets
from .groups import (FiniteGroup, GroupSpec, centralizer, enumerate_residue_group, kernel_elements,
                     lift_elements)
from .matspace import Family, LieSpace, full_space, lie_space
from .oracle import character_degrees
from .rings import RingKind, RingSpec

log = logging.getLogger(__name__)


@dataclass
class KernelCharacter:
    """psi_A on L(C), or psi_[A] when the parameter is only defined up to scalars."""

    L: LieSpace
    A: np.ndarray
    scalar_class: bool = False

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=np.int64)
        if not self.scalar_class and not bool(self.L.contains(self.A)):
            raise ValueError("parameter is not in the Lie space")

    def exponent(self, X: np.ndarray) -> np.ndarray:
        """Exponents (mod p) of psi(tr(AX)) for residue matrices X (batched)."""
        F = self.L.F
        t = ms.trace_form(F.tables(), np.broadcast_to(self.A, X.shape), X)
        return F.trace_array()[t]

    @cached_property
    def vector(self) -> np.ndarray:
        return self.exponent(self.L.basis)

    def on_kernel(self, Q: int, mats: np.ndarray) -> np.ndarray:
        """Evaluate on ring matrices I + pi X."""
        X = ring_to_kernel(Q, mats)
        return self.exponent(X)

    def same_as(self, other: "KernelCharacter") -> bool:
        return bool(np.array_equal(self.vector, other.vector))


def ring_to_kernel(Q: int, mats: np.ndarray) -> np.ndarray:
    """X from I + pi X (ring codes) -> residue codes."""
    n = mats.shape[-1]
    d = np.array(mats, dtype=np.int64)
    idx = np.arange(n)
    # I + pi X has diagonal codes 1 + Q x; off-diagonal Q x
    d[..., idx, idx] -= 1
    if np.any(d % Q):
        raise ValueError("matrix is not in the congruence kernel")
    return d // Q


def kernel_character(L: LieSpace, A, scalar_class: bool = False) -> KernelCharacter:
    return KernelCharacter(L, A, scalar_class)


@dataclass
class OrbitRecord:
    rep: np.ndarray  # least parameter (by key) whose character lies in the orbit
    rep_char: int
    size: int
    stabilizer: np.ndarray  # indices into C(O_1), from the ring-level action
    centralizer_order: int  # |Z(A) cap C(O_1)| or |Z([A]) cap C(O_1)|
    stab_matches_centralizer: bool
    degrees: list[int] = field(default_factory=list)

    @property
    def stab_order(self) -> int:
        return len(self.stabilizer)

    def invariants(self) -> tuple:
        return (self.size, self.stab_order, tuple(sorted(Counter(self.degrees).items())))


@dataclass(frozen=True)
class IrrepDescriptor:
    orbit: int
    degree: int
    count: int
    dim: int


def _digits(idx: np.ndarray, p: int, d: int) -> np.ndarray:
    return (np.asarray(idx, dtype=np.int64)[..., None] // p ** np.arange(d, dtype=np.int64)) % p


def _index(vecs: np.ndarray, p: int) -> np.ndarray:
    return vecs @ (p ** np.arange(vecs.shape[-1], dtype=np.int64))


class CliffordEngine:
    """Orbit method for C(O_2) over one length-two ring."""

    def __init__(self, spec: GroupSpec, budgets: Budgets | None = None, threads: int = 1):
        self.spec = spec
        self.budgets = budgets or BUDGETS
        if spec.q > self.budgets.max_q:
            raise BudgetExceeded(f"q = {spec.q} exceeds the configured cap {self.budgets.max_q}")
        self.threads = max(1, threads)
        self.R = spec.local_ring()
        self.F = self.R.F
        self.p = self.F.p
        self.L = lie_space(spec.family, spec.n, self.F, spec.base_q)
        self.scalar = spec.scalar_classes

    @cached_property
    def G1(self) -> FiniteGroup:
        G = enumerate_residue_group(self.spec, self.budgets.scan)
        if G.order > self.budgets.orbit_group:
            raise BudgetExceeded(f"|C(O_1)| = {G.order} exceeds orbit budget {self.budgets.orbit_group}")
        return G

    @property
    def group_order(self) -> int:
        return self.G1.order * self.L.size

    @property
    def n_chars(self) -> int:
        return self.L.size

    @cached_property
    def lifts(self) -> np.ndarray:
        return lift_elements(self.spec, self.G1.elements)

    @cached_property
    def action(self) -> np.ndarray:
        """M[g] with coords(g X g^-1) = M[g] @ coords(X), from ring-level conjugation."""
        T = self.R.tables
        g = self.lifts
        ginv = ms.inverse(T, g)
        d = self.L.dim
        out = np.empty((len(g), d, d), dtype=np.int64)
        kern = kernel_elements(self.spec, self.L.basis)
        for k in range(d):
            conj = ms.mat_mul(T, ms.mat_mul(T, g, kern[k][None]), ginv)
            X = ring_to_kernel(self.R.Q, conj)
            out[:, :, k] = self.L.coords(X)
        return out

    def act(self, chars: np.ndarray, g: int | np.ndarray) -> np.ndarray:
        vec = _digits(chars, self.p, self.L.dim)
        return _index(vec @ self.action[g] % self.p, self.p)

    # -- parameters ------------------------------------------------------------
    @cached_property
    def params(self) -> np.ndarray:
        """All parameters: M_C itself, or M_N(F) when characters are indexed by scalar classes."""
        if self.scalar:
            return full_space(self.spec.N, self.F).elements()
        return self.L.elements()

    @cached_property
    def param_chars(self) -> np.ndarray:
        """Character index of psi_A for every parameter A."""
        T = self.F.tables()
        B = self.L.basis
        out = np.empty((len(self.params), self.L.dim), dtype=np.int64)
        tr = self.F.trace_array()
        for l in range(self.L.dim):
            out[:, l] = tr[ms.trace_form(T, self.params, np.broadcast_to(B[l], self.params.shape))]
        return _index(out, self.p)

    def character_of(self, A) -> int:
        KC = KernelCharacter(self.L, A, self.scalar)
        return int(_index(KC.vector[None], self.p)[0])

    def parameter_map_ok(self) -> bool:
        """Every character is some psi_A, with fibres of size q (scalar classes) or 1."""
        counts = np.bincount(self.param_chars, minlength=self.n_chars)
        want = self.F.q if self.scalar else 1
        return bool(np.all(counts == want))

    # -- orbits ----------------------------------------------------------------
    @cached_property
    def orbit_labels(self) -> np.ndarray:
        n = self.n_chars
        src, dst = [], []
        allc = np.arange(n)
        for g in self.G1.generators():
            src.append(allc)
            dst.append(self.act(allc, g))
        src = np.concatenate(src)
        dst = np.concatenate(dst)
        graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n))
        _, labels = connected_components(graph, directed=True, connection="weak")
        return labels

    def _orbit_reps(self):
        keys = ms.encode(self.params, self.F.q)
        lab = self.orbit_labels[self.param_chars]
        order = np.lexsort((keys, lab))
        first = np.ones(len(order), dtype=bool)
        first[1:] = lab[order][1:] != lab[order][:-1]
        reps = order[first]
        # deterministic orbit order: by representative key
        reps = reps[np.argsort(keys[reps], kind="stable")]
        return reps

    def _orbit(self, ridx: int) -> OrbitRecord:
        A = self.params[ridx]
        c = int(self.param_chars[ridx])
        size = int(np.count_nonzero(self.orbit_labels == self.orbit_labels[c]))
        images = self.act(np.array([c]), np.arange(self.G1.order))
        stab = np.nonzero(images == c)[0]
        mode = "scalar-class" if self.scalar else "exact"
        cz = centralizer(self.G1, A, mode)
        rec = OrbitRecord(A, c, size, stab, len(cz), bool(np.array_equal(np.sort(cz), stab)))
        return rec

    def _degrees(self, rec: OrbitRecord) -> list[int]:
        if rec.stab_order == self.G1.order:
            return self.residue_degrees
        H = self.G1.subgroup(rec.stabilizer)
        return character_degrees(H)

    @cached_property
    def residue_degrees(self) -> list[int]:
        return character_degrees(self.G1)

    @cached_property
    def orbits(self) -> list[OrbitRecord]:
        reps = self._orbit_reps()
        recs = [self._orbit(int(r)) for r in reps]
        if self.threads > 1:
            with ThreadPoolExecutor(self.threads) as ex:
                degs = list(ex.map(self._degrees, recs))
        else:
            degs = [self._degrees(r) for r in recs]
        for r, d in zip(recs, degs):
            r.degrees = d
        return recs

    # -- dimensions ------------------------------------------------------------
    @cached_property
    def descriptors(self) -> list[IrrepDescriptor]:
        out = []
        G = self.G1.order
        for i, rec in enumerate(self.orbits):
            index = G // rec.stab_order
            for d, cnt in sorted(Counter(rec.degrees).items()):
                out.append(IrrepDescriptor(i, d, cnt, index * d))
        return out

    def irr_multiset(self) -> list[tuple[int, int]]:
        c: Counter = Counter()
        for D in self.descriptors:
            c[D.dim] += D.count
        return sorted(c.items())

    def checks(self) -> dict:
        recs = self.orbits
        G = self.G1.order
        irr = self.irr_multiset()
        return {
            "partition": sum(r.size for r in recs) == self.n_chars,
            "parameter_map": self.parameter_map_ok(),
            "stabilizer_equals_centralizer": all(r.stab_matches_centralizer for r in recs),
            "stabilizer_order": all(r.stab_order == r.centralizer_order for r in recs),
            "index": all(r.size * r.centralizer_order == G for r in recs),
            "sum_squares": sum(cnt * d * d for d, cnt in irr) == self.group_order,
        }

    def irrep_count(self) -> int:
        return sum(D.count for D in self.descriptors)


def adjoint_orbits(spec: GroupSpec, **kw) -> list[OrbitRecord]:
    return CliffordEngine(spec, **kw).orbits


def irr_dimensions(spec: GroupSpec, **kw) -> list[IrrepDescriptor]:
    eng = CliffordEngine(spec, **kw)
    bad = [k for k, v in eng.checks().items() if not v]
    if bad:
        raise AssertionError(f"engine identities failed: {bad}")
    return eng.descriptors


@dataclass
class Comparison:
    family: Family
    n: int
    p: int
    m: int
    multisets: dict[str, list[tuple[int, int]]]
    equal: bool
    aligned: bool
    ties: list[tuple]
    unmatched: dict[str, list[tuple]]
    checks: dict[str, dict]


def compare_rings(family, n: int, p: int, m: int = 1, budgets: Budgets | None = None,
                  threads: int = 1) -> Comparison:
    """Run the engine over both ring kinds and align orbits by invariants."""
    family = Family(family)
    multisets, inv, checks = {}, {}, {}
    for kind in (RingKind.UNRAMIFIED, RingKind.RAMIFIED):
        spec = GroupSpec(family, n, RingSpec(kind, p, m))
        eng = CliffordEngine(spec, budgets, threads)
        multisets[kind.value] = eng.irr_multiset()
        inv[kind.value] = Counter(r.invariants() for r in eng.orbits)
        checks[kind.value] = eng.checks()
    a, b = inv["unramified"], inv["ramified"]
    unmatched = {"unramified": sorted((a - b).elements()), "ramified": sorted((b - a).elements())}
    ties = sorted((k, v) for k, v in a.items() if v > 1 and b.get(k) == v)
    return Comparison(family, n, p, m, multisets,
                      multisets["unramified"] == multisets["ramified"],
                      not unmatched["unramified"] and not unmatched["ramified"],
                      ties, unmatched, checks)
