"""Two-phase tableau simplex with Bland's rule.

Works on exact rationals (object arrays of ``Fraction``) or floats with
tolerance-guarded comparisons. Problems are given in equality form::

    minimize c.x  subject to  A x = b,  x >= 0
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverFailure
from .numeric import Arith

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

DEFAULT_MAX_ITER = 5000


@dataclass(frozen=True)
class LPResult:
    status: str
    x: np.ndarray | None = None
    value: object = None
    iterations: int = 0

    @property
    def feasible(self) -> bool:
        return self.status != INFEASIBLE


class _Tableau:
    def __init__(self, T, basis, arith, max_iter):
        self.T = T  # last row: reduced costs | -objective
        self.basis = basis
        self.arith = arith
        self.max_iter = max_iter
        self.iterations = 0

    def pivot(self, r, c):
        T = self.T
        T[r] = T[r] / T[r, c]
        for i in range(T.shape[0]):
            if i != r and T[i, c] != 0:
                T[i] = T[i] - T[i, c] * T[r]
        self.basis[r] = c

    def _zero(self, v):
        return v == 0 if self.arith.exact else abs(v) <= self.arith.tol

    def run(self, ncols):
        """Iterate until optimal; returns False on unboundedness."""
        T, eps = self.T, self.arith.eps
        m = T.shape[0] - 1
        while True:
            if self.iterations >= self.max_iter:
                raise SolverFailure(f"simplex exceeded {self.max_iter} iterations")
            cost = T[m]
            entering = next((j for j in range(ncols) if cost[j] < -eps), None)
            if entering is None:
                return True
            leave, best = None, None
            for i in range(m):
                a = T[i, entering]
                if a > eps:
                    ratio = T[i, -1] / a
                    if (
                        best is None
                        or ratio < best
                        or (ratio == best and self.basis[i] < self.basis[leave])
                    ):
                        leave, best = i, ratio
            if leave is None:
                return False
            self.pivot(leave, entering)
            self.iterations += 1


def solve_lp(c, A, b, arith: Arith, max_iter: int = DEFAULT_MAX_ITER) -> LPResult:
    """Minimize ``c.x`` over ``{x >= 0 : A x = b}``.

    ``c`` may be ``None`` for a pure feasibility problem (phase one only).
    Raises :class:`SolverFailure` when the iteration cap is hit.
    """
    A = arith.array(A)
    b = arith.array(b)
    m, n = A.shape
    zero = arith.scalar(0)
    one = arith.scalar(1)
    for i in range(m):
        if b[i] < 0:
            A[i] = -A[i]
            b[i] = -b[i]

    # phase one: artificial variables n..n+m-1
    T = arith.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    for i in range(m):
        T[i, n + i] = one
    T[:m, -1] = b
    for j in range(n):
        T[m, j] = zero - sum((A[i, j] for i in range(m)), zero)
    T[m, -1] = zero - sum((b[i] for i in range(m)), zero)
    tab = _Tableau(T, list(range(n, n + m)), arith, max_iter)
    tab.run(n + m)
    if not arith.le(-T[m, -1], zero):
        return LPResult(INFEASIBLE, iterations=tab.iterations)

    # drive artificials out of the basis, dropping redundant rows
    keep = []
    for i in range(m):
        if tab.basis[i] >= n:
            j = next((j for j in range(n) if not tab._zero(T[i, j])), None)
            if j is None:
                continue
            tab.pivot(i, j)
        keep.append(i)
    rows = keep + [m]
    T = np.concatenate([T[rows][:, :n], T[rows][:, -1:]], axis=1)
    basis = [tab.basis[i] for i in keep]
    m = len(keep)

    if c is None:
        x = _extract(T, basis, n, arith)
        return LPResult(OPTIMAL, x, zero, tab.iterations)

    c = arith.array(c)
    T[m, :n] = c
    T[m, -1] = zero
    for i, j in enumerate(basis):
        if not tab._zero(c[j]):
            T[m] = T[m] - c[j] * T[i]
    tab2 = _Tableau(T, basis, arith, max_iter - tab.iterations)
    bounded = tab2.run(n)
    total = tab.iterations + tab2.iterations
    if not bounded:
        return LPResult(UNBOUNDED, iterations=total)
    x = _extract(T, tab2.basis, n, arith)
    return LPResult(OPTIMAL, x, -T[m, -1], total)


def _extract(T, basis, n, arith):
    x = arith.zeros(n)
    for i, j in enumerate(basis):
        x[j] = T[i, -1]
    return x


def convex_weights(points: np.ndarray, target: np.ndarray, arith: Arith, max_iter: int = DEFAULT_MAX_ITER):
    """Weights ``w >= 0, sum w = 1`` with ``points @ w == target``, or ``None``.

    ``points`` holds candidate points as columns.
    """
    points = np.asarray(points)
    k, m = points.shape
    if m == 0:
        return None
    A = arith.zeros((k + 1, m))
    A[:k] = points
    A[k] = arith.scalar(1)
    b = arith.zeros(k + 1)
    b[:k] = target
    b[k] = arith.scalar(1)
    res = solve_lp(None, A, b, arith, max_iter)
    return res.x if res.feasible else None
