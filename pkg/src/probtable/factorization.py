"""Rank factorization p = t u of a probability table."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateTable, DimensionMismatch, InconsistentRank, SingularBasis
from .linalg import default_rank_tau, inverse, is_nonsingular, matrix_rank, pivot_positions
from .numeric import Arith, encode_matrix
from .table import MeasurementLayout, ProbabilityTable


@dataclass(frozen=True, eq=False)
class StateVector:
    coords: np.ndarray
    label: str
    index: int | None = None

    @property
    def K(self) -> int:
        return len(self.coords)


@dataclass(frozen=True, eq=False)
class OutcomeVector:
    coords: np.ndarray
    label: str
    row: int | None = None
    measurement: str | None = None

    @property
    def K(self) -> int:
        return len(self.coords)


@dataclass(frozen=True, eq=False)
class Factorization:
    """Result of :func:`factorize`.

    ``t`` has the outcome vectors as rows, ``u`` the state vectors as
    columns, both in the table's original order. ``pivot_rows`` and
    ``pivot_cols`` select the nonsingular block ``a`` of the table, and
    ``u[:, pivot_cols] == x``.
    """

    K: int
    t: np.ndarray
    u: np.ndarray
    x: np.ndarray
    pivot_rows: tuple[int, ...]
    pivot_cols: tuple[int, ...]
    p: np.ndarray
    layout: MeasurementLayout
    state_names: tuple[str, ...]
    mode: str
    tolerance: float

    @property
    def arith(self) -> Arith:
        return Arith(self.mode, self.tolerance)

    @property
    def L(self) -> int:
        return self.t.shape[0]

    @property
    def M(self) -> int:
        return self.u.shape[1]

    def _other_rows(self):
        return [i for i in range(self.L) if i not in self.pivot_rows]

    def _other_cols(self):
        return [j for j in range(self.M) if j not in self.pivot_cols]

    @property
    def a(self) -> np.ndarray:
        return self.p[np.ix_(self.pivot_rows, self.pivot_cols)]

    @property
    def b(self) -> np.ndarray:
        return self.p[np.ix_(self.pivot_rows, self._other_cols())]

    @property
    def c(self) -> np.ndarray:
        return self.p[np.ix_(self._other_rows(), self.pivot_cols)]

    def state_vector(self, j: int) -> StateVector:
        return StateVector(self.u[:, j].copy(), self.state_names[j], j)

    def outcome_vector(self, i: int) -> OutcomeVector:
        m, _ = self.layout.locate(i)
        return OutcomeVector(self.t[i].copy(), self.layout.label(i), i, self.layout.measurements[m].name)

    def states(self) -> list[StateVector]:
        return [self.state_vector(j) for j in range(self.M)]

    def outcomes(self) -> list[OutcomeVector]:
        return [self.outcome_vector(i) for i in range(self.L)]

    def reconstruct(self) -> np.ndarray:
        return self.t @ self.u

    def reconstruction_error(self) -> float:
        return self.arith.max_abs(self.p - self.reconstruct())

    def to_dict(self) -> dict:
        return {
            "K": self.K,
            "x": encode_matrix(self.x),
            "pivot_rows": list(self.pivot_rows),
            "pivot_cols": list(self.pivot_cols),
            "t": encode_matrix(self.t),
            "u": encode_matrix(self.u),
        }


def rank_of(table: ProbabilityTable, tau: float | None = None) -> int:
    """Rank of the table.

    Exact mode uses fraction-free elimination; float mode counts singular
    values above ``tau`` (default ``max(L, M) * eps * sigma_max``).
    """
    k = matrix_rank(table.entries, table.arith, tau)
    if k == 0:
        raise DegenerateTable("table has rank 0")
    return k


def _factor(p, arith, K, x, cols, tau):
    """Core of the factorization on a bare matrix; returns (t, u, x, rows, cols)."""
    rows, pcols = pivot_positions(p, arith, cols=cols, tau=tau, max_pivots=K)
    if len(rows) < K:
        if cols is not None:
            raise SingularBasis(f"chosen basis spans only {len(rows)} of {K} dimensions")
        raise InconsistentRank(f"pivoting found {len(rows)} pivots above tau={tau:g}, rank is {K}")
    if x is None:
        x = arith.eye(K)
    else:
        x = arith.array(x)
        if x.shape != (K, K):
            raise SingularBasis(f"basis matrix must be {K}x{K}, got {x.shape}")
        if not is_nonsingular(x, arith):
            raise SingularBasis("basis matrix is singular")
    a = p[np.ix_(rows, pcols)]
    xinv = inverse(x, arith)
    t = p[:, pcols] @ xinv
    if arith.exact:
        u = x @ (inverse(a, arith) @ p[rows, :])
    else:
        u = x @ np.linalg.solve(a.astype(float), p[rows, :].astype(float))
        u[:, pcols] = x
    return t, u, x, rows, pcols


def factorize(
    table: ProbabilityTable,
    x=None,
    *,
    basis_states: Sequence[int] | None = None,
    tau: float | None = None,
) -> Factorization:
    """Decompose the table as ``p = t u`` with ``u[:, pivot_cols] = x``.

    Parameters
    ----------
    x : K x K matrix, optional
        Representatives of the basis states; identity by default.
    basis_states : list of state indices, optional
        Force these K states to be the basis (pivot columns).
    tau : float, optional
        Float-mode pivot/rank cutoff.
    """
    p = table.entries
    arith = table.arith
    if not arith.exact and tau is None:
        tau = default_rank_tau(p)
    K = rank_of(table, tau)
    cols = None
    if basis_states is not None:
        cols = [int(j) for j in basis_states]
        if len(cols) != K or len(set(cols)) != K:
            raise SingularBasis(f"need {K} distinct basis states, got {len(cols)}")
        if any(not 0 <= j < table.M for j in cols):
            raise SingularBasis("basis state index out of range")
    t, u, x, rows, pcols = _factor(p, arith, K, x, cols, tau or 0.0)
    f = Factorization(K, t, u, x, tuple(rows), tuple(pcols), p, table.layout, table.state_names, table.mode, table.tolerance)
    _check_reconstruction(f)
    return f


def factorize_by_outcomes(
    table: ProbabilityTable,
    v=None,
    *,
    basis_outcomes: Sequence[int] | None = None,
    tau: float | None = None,
) -> Factorization:
    """Variant fixing the representatives ``v`` of K basis outcomes instead of states.

    Returns a :class:`Factorization` with ``t[pivot_rows] == v``; its ``x``
    is then the derived block ``u[:, pivot_cols]``.
    """
    p = table.entries
    arith = table.arith
    if not arith.exact and tau is None:
        tau = default_rank_tau(p)
    K = rank_of(table, tau)
    rows_in = None
    if basis_outcomes is not None:
        rows_in = [int(i) for i in basis_outcomes]
        if len(rows_in) != K or len(set(rows_in)) != K:
            raise SingularBasis(f"need {K} distinct basis outcomes, got {len(rows_in)}")
    vt = None if v is None else arith.array(v).T
    # factor the transpose: its "states" are our outcomes
    tt, ut, _, state_pivots, outcome_pivots = _factor(p.T, arith, K, vt, rows_in, tau or 0.0)
    t, u = ut.T, tt.T
    f = Factorization(
        K, t, u, u[:, list(state_pivots)].copy(), tuple(outcome_pivots), tuple(state_pivots), p,
        table.layout, table.state_names, table.mode, table.tolerance,
    )
    _check_reconstruction(f)
    return f


def _check_reconstruction(f: Factorization):
    if f.arith.exact:
        return
    err = f.reconstruction_error()
    if err > f.tolerance:
        raise InconsistentRank(f"reconstruction error {err:.3g} exceeds tolerance {f.tolerance:g}")


def probability(r: OutcomeVector, s: StateVector):
    """Scalar product ``r . s``."""
    rc, sc = np.asarray(r.coords), np.asarray(s.coords)
    if rc.shape != sc.shape:
        raise DimensionMismatch(f"outcome vector has dimension {rc.shape}, state vector {sc.shape}")
    return rc @ sc
