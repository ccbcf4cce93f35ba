"""Character degrees of an explicitly enumerated finite group (Dixon-Schneider).

Class sums C_1..C_k satisfy C_j C_l = sum_k a_jlk C_k.  For each irreducible
character the central characters w_k = |C_k| chi(g_k) / chi(1) form a common
eigenvector of the matrices (M_j)_{l,k} = a_jlk.  Working modulo a prime
ell = 1 (mod exp G), the eigenvectors are found by splitting eigenspaces and
the degree follows from  chi(1)^2 * sum_k w_k w_{k*} / |C_k| = |G|.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from math import isqrt

import numpy as np

from . import modp
from .config import BUDGETS, BudgetExceeded
from .fields import is_prime
from .groups import FiniteGroup

log = logging.getLogger(__name__)


@dataclass
class ClassAlgebra:
    reps: list[int]
    sizes: np.ndarray
    inverse_class: np.ndarray
    coeffs: np.ndarray  # coeffs[j, l, k] = #{x in C_j : x^-1 g_k in C_l}
    exponent: int
    order: int
    identity_class: int

    @property
    def count(self) -> int:
        return len(self.reps)

    def check(self) -> bool:
        """sum_k a_jlk |C_k| = |C_j| |C_l|."""
        lhs = self.coeffs @ self.sizes
        return bool(np.all(lhs == np.outer(self.sizes, self.sizes)))


def class_algebra(G: FiniteGroup, budget: int | None = None) -> ClassAlgebra:
    budget = BUDGETS.oracle if budget is None else budget
    if G.order > budget:
        raise BudgetExceeded(f"|G| = {G.order} exceeds oracle budget {budget}")
    cd = G.classes
    k = cd.count
    cls = cd.class_of
    inv = G.inverses
    allx = np.arange(G.order)
    coeffs = np.zeros((k, k, k), dtype=np.int64)
    for c, z in enumerate(cd.reps):
        y = G.mul(inv, np.full(G.order, z))  # x^-1 z for every x
        h = np.bincount(cls[allx] * k + cls[y], minlength=k * k)
        coeffs[:, :, c] = h.reshape(k, k)
    inverse_class = cls[inv[np.array(cd.reps)]]
    return ClassAlgebra(list(cd.reps), np.array(cd.sizes, dtype=np.int64), inverse_class,
                        coeffs, G.exponent(), G.order, int(cls[G.identity]))


def choose_prime(exponent: int, order: int, skip: int = 0) -> int:
    """Smallest prime ell = 1 mod exponent with ell > 2 sqrt(order), after ``skip`` hits."""
    bound = 2 * isqrt(order) + 2
    ell = exponent + 1
    while True:
        if ell > bound and is_prime(ell):
            if skip == 0:
                return ell
            skip -= 1
        ell += exponent


def _split(mats: list[np.ndarray], dim: int, ell: int, seed: int) -> list[np.ndarray] | None:
    """Common eigenvectors (columns) of commuting matrices; None if splitting stalls."""
    rng = random.Random(seed)
    spaces = [np.eye(dim, dtype=np.int64)]  # columns span an invariant subspace
    combo = sum(rng.randrange(ell) * M for M in mats) % ell
    for M in [combo] + mats:
        if all(W.shape[1] == 1 for W in spaces):
            break
        nxt = []
        for W in spaces:
            if W.shape[1] == 1:
                nxt.append(W)
                continue
            piv, Tinv = modp.solve_coordinates(W.T, ell)
            R = (((M @ W) % ell)[piv].T @ Tinv % ell).T  # M W = W R
            roots = modp.poly_roots(modp.charpoly(R, ell), ell)
            total = 0
            for lam in roots:
                ns = modp.nullspace((R - lam * np.eye(len(R), dtype=np.int64)) % ell, ell)
                total += len(ns)
                nxt.append((W @ ns.T) % ell)
            if total != W.shape[1]:
                return None  # not diagonalizable over this field: wrong prime
        spaces = nxt
    if any(W.shape[1] != 1 for W in spaces):
        return None
    return [W[:, 0] for W in spaces]


def character_degrees(G: FiniteGroup, seed: int = 0, retries: int = 4,
                      algebra: ClassAlgebra | None = None) -> list[int]:
    """Sorted multiset of irreducible character degrees."""
    CA = algebra if algebra is not None else class_algebra(G)
    k, order = CA.count, CA.order
    if all(s == 1 for s in CA.sizes):
        return [1] * order
    mats = [CA.coeffs[j] for j in range(k)]
    for attempt in range(retries):
        ell = choose_prime(CA.exponent, order, attempt)
        vecs = _split([M % ell for M in mats], k, ell, seed + attempt)
        if vecs is None or len(vecs) != k:
            log.debug("splitting failed mod %d, trying next prime", ell)
            continue
        degs = []
        sizes_inv = np.array([pow(int(s), -1, ell) for s in CA.sizes], dtype=np.int64)
        for v in vecs:
            v = v * pow(int(v[CA.identity_class]), -1, ell) % ell  # w = 1 on the identity
            norm = int(np.sum(v * v[CA.inverse_class] % ell * sizes_inv % ell) % ell)
            d2 = order * pow(norm, -1, ell) % ell
            d = next((d for d in range(1, isqrt(order) + 1) if d * d % ell == d2), None)
            if d is None:
                break
            degs.append(d)
        else:
            return sorted(degs)
        log.debug("degree recovery failed mod %d", ell)
    raise RuntimeError("Dixon-Schneider splitting failed for every prime tried")


def check_degrees(order: int, class_count: int, degs: list[int]) -> dict:
    return {
        "sum_squares": sum(d * d for d in degs) == order,
        "count_equals_classes": len(degs) == class_count,
        "degrees_divide_order": all(order % d == 0 for d in degs),
    }
