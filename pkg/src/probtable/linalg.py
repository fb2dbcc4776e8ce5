"""Pivoting, rank and inversion over exact rationals or floats."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from .numeric import Arith


def _integer_rows(A: np.ndarray) -> list[list[int]]:
    rows = []
    for row in A:
        den = 1
        for v in row:
            den = math.lcm(den, Fraction(v).denominator)
        rows.append([int(Fraction(v) * den) for v in row])
    return rows


def _pivots_exact(A, cols, max_pivots):
    M = _integer_rows(A)
    m = len(M)
    perm = list(range(m))
    pivots = []
    prev = 1
    r = 0
    for pos, c in enumerate(cols):
        if r == m or len(pivots) == max_pivots:
            break
        best, bestv = None, 0
        for i in range(r, m):
            v = abs(M[i][c])
            if v > bestv or (v == bestv and v and perm[i] < perm[best]):
                best, bestv = i, v
        if best is None:
            continue
        M[r], M[best] = M[best], M[r]
        perm[r], perm[best] = perm[best], perm[r]
        piv = M[r][c]
        rest = cols[pos + 1:]
        for i in range(r + 1, m):
            mic = M[i][c]
            Mi, Mr = M[i], M[r]
            for j in rest:
                # Bareiss step: division is exact
                Mi[j] = (piv * Mi[j] - mic * Mr[j]) // prev
            Mi[c] = 0
        prev = piv
        pivots.append((perm[r], c))
        r += 1
    return pivots


def _pivots_float(A, cols, tau, max_pivots):
    M = np.array(A, dtype=float)
    m = M.shape[0]
    perm = list(range(m))
    pivots = []
    r = 0
    for c in cols:
        if r == m or len(pivots) == max_pivots:
            break
        column = np.abs(M[r:, c])
        i = int(np.argmax(column)) + r
        if column[i - r] <= tau:
            continue
        if i != r:
            M[[r, i]] = M[[i, r]]
            perm[r], perm[i] = perm[i], perm[r]
        factors = M[r + 1:, c] / M[r, c]
        M[r + 1:] -= np.outer(factors, M[r])
        M[r + 1:, c] = 0.0
        pivots.append((perm[r], c))
        r += 1
    return pivots


def pivot_positions(
    A: np.ndarray,
    arith: Arith,
    *,
    cols: Sequence[int] | None = None,
    tau: float = 0.0,
    max_pivots: int | None = None,
) -> tuple[list[int], list[int]]:
    """Row-echelon pivots of ``A`` with partial pivoting.

    Columns are scanned left to right (or in the order of ``cols``); in each
    column the remaining row of largest magnitude is taken, ties going to the
    lowest original row index. Columns without an entry above ``tau`` are
    skipped. Exact mode runs fraction-free (Bareiss) elimination on an
    integer-scaled copy.

    Returns
    -------
    (pivot_rows, pivot_cols)
        Equal-length lists; ``A[pivot_rows][:, pivot_cols]`` is nonsingular.
    """
    A = np.asarray(A)
    cols = list(range(A.shape[1])) if cols is None else list(cols)
    if A.shape[0] == 0 or not cols:
        return [], []
    if arith.exact:
        pairs = _pivots_exact(A, cols, max_pivots)
    else:
        pairs = _pivots_float(A, cols, tau, max_pivots)
    return [p[0] for p in pairs], [p[1] for p in pairs]


def default_rank_tau(A: np.ndarray) -> float:
    """``max(L, M) * eps * sigma_max``: the usual numerical-rank cutoff."""
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return 0.0
    sigma = np.linalg.svd(A, compute_uv=False)
    return max(A.shape) * np.finfo(float).eps * float(sigma[0])


def matrix_rank(A: np.ndarray, arith: Arith, tau: float | None = None) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    if arith.exact:
        rows, _ = pivot_positions(A, arith)
        return len(rows)
    F = A.astype(float)
    sigma = np.linalg.svd(F, compute_uv=False)
    if tau is None:
        tau = max(F.shape) * np.finfo(float).eps * float(sigma[0])
    return int(np.sum(sigma > tau))


def inverse(A: np.ndarray, arith: Arith) -> np.ndarray:
    """Inverse of a square matrix; raises ``np.linalg.LinAlgError`` if singular."""
    A = np.asarray(A)
    k = A.shape[0]
    if A.ndim != 2 or A.shape[1] != k:
        raise ValueError("inverse needs a square matrix")
    if not arith.exact:
        return np.linalg.inv(A.astype(float))
    M = np.concatenate([A.astype(object), arith.eye(k)], axis=1)
    for c in range(k):
        r = next((i for i in range(c, k) if M[i, c] != 0), None)
        if r is None:
            raise np.linalg.LinAlgError("singular matrix")
        if r != c:
            M[[c, r]] = M[[r, c]]
        M[c] = M[c] / M[c, c]
        for i in range(k):
            if i != c and M[i, c] != 0:
                M[i] = M[i] - M[i, c] * M[c]
    return M[:, k:]


def is_nonsingular(A: np.ndarray, arith: Arith) -> bool:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        return False
    if A.shape[0] == 0:
        return True
    return matrix_rank(A, arith) == A.shape[0]
