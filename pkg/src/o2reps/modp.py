"""Dense linear algebra over a prime field Z/l with numpy int64 arrays.

Entries are kept in [0, l); l must be below 2**31 so products fit in int64.
"""

from __future__ import annotations

import numpy as np


def rref(M: np.ndarray, l: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    A = np.array(M, dtype=np.int64) % l
    rows, cols = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if len(nz) == 0:
            continue
        i = r + nz[0]
        if i != r:
            A[[r, i]] = A[[i, r]]
        A[r] = (A[r] * pow(int(A[r, c]), -1, l)) % l
        col = A[:, c].copy()
        col[r] = 0
        mask = np.nonzero(col)[0]
        if len(mask):
            A[mask] = (A[mask] - np.outer(col[mask], A[r])) % l
        pivots.append(c)
        r += 1
    return A, pivots


def rank(M: np.ndarray, l: int) -> int:
    return len(rref(M, l)[1])


def nullspace(M: np.ndarray, l: int) -> np.ndarray:
    """Basis (as rows) of {v : M v = 0}."""
    M = np.atleast_2d(np.asarray(M, dtype=np.int64))
    cols = M.shape[1]
    R, piv = rref(M, l)
    free = [c for c in range(cols) if c not in piv]
    out = np.zeros((len(free), cols), dtype=np.int64)
    for k, f in enumerate(free):
        out[k, f] = 1
        for i, c in enumerate(piv):
            out[k, c] = (-R[i, f]) % l
    return out


def left_nullspace(M: np.ndarray, l: int) -> np.ndarray:
    return nullspace(np.asarray(M).T, l)


def inverse(M: np.ndarray, l: int) -> np.ndarray:
    n = M.shape[0]
    R, piv = rref(np.hstack([np.asarray(M) % l, np.eye(n, dtype=np.int64)]), l)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return R[:, n:]


def row_basis(M: np.ndarray, l: int) -> np.ndarray:
    R, piv = rref(M, l)
    return R[: len(piv)]


def in_span(basis: np.ndarray, v: np.ndarray, l: int) -> bool:
    if len(basis) == 0:
        return not np.any(np.asarray(v) % l)
    return rank(np.vstack([basis, v]), l) == rank(basis, l)


def solve_coordinates(basis: np.ndarray, l: int) -> tuple[list[int], np.ndarray]:
    """Precompute coordinate extraction for vectors in the row span of ``basis``.

    Returns (columns, T) with coords(v) = v[columns] @ T mod l for v in span.
    ``basis`` must have independent rows.
    """
    basis = np.asarray(basis, dtype=np.int64) % l
    _, piv = rref(basis, l)
    if len(piv) != basis.shape[0]:
        raise ValueError("basis rows are dependent")
    sub = basis[:, piv]
    return piv, inverse(sub, l)


def charpoly(M: np.ndarray, l: int) -> list[int]:
    """Characteristic polynomial det(xI - M), coefficients low to high.

    Hessenberg reduction followed by the standard recurrence.
    """
    H = np.array(M, dtype=np.int64) % l
    n = H.shape[0]
    for m in range(1, n - 1):
        nz = np.nonzero(H[m:, m - 1])[0]
        if len(nz) == 0:
            continue
        i = m + nz[0]
        if i != m:
            H[[i, m]] = H[[m, i]]
            H[:, [i, m]] = H[:, [m, i]]
        tinv = pow(int(H[m, m - 1]), -1, l)
        for i in range(m + 1, n):
            u = (int(H[i, m - 1]) * tinv) % l
            if u:
                H[i] = (H[i] - u * H[m]) % l
                H[:, m] = (H[:, m] + u * H[:, i]) % l
    polys = [[1]]
    for m in range(1, n + 1):
        # (x - h_mm) p_{m-1}
        prev = polys[m - 1]
        new = [0] * (m + 1)
        hmm = int(H[m - 1, m - 1])
        for k, c in enumerate(prev):
            new[k + 1] = (new[k + 1] + c) % l
            new[k] = (new[k] - hmm * c) % l
        t = 1
        for i in range(1, m):
            t = (t * int(H[m - i, m - i - 1])) % l
            coef = (t * int(H[m - i - 1, m - 1])) % l
            if coef:
                for k, c in enumerate(polys[m - i - 1]):
                    new[k] = (new[k] - coef * c) % l
        polys.append(new)
    return polys[n]


def poly_roots(coeffs: list[int], l: int) -> list[int]:
    """Distinct roots in Z/l by vectorized Horner evaluation at every point."""
    x = np.arange(l, dtype=np.int64)
    v = np.zeros(l, dtype=np.int64)
    for c in reversed(coeffs):
        v = (v * x + c) % l
    return [int(r) for r in np.nonzero(v == 0)[0]]
