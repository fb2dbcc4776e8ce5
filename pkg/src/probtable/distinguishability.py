"""One-shot distinguishability: the maximal identity pattern in a table."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InconsistentTable, InvalidWeights, NotDistinguishable, SearchBudgetExceeded, SolverFailure
from .factorization import Factorization, OutcomeVector
from .geometry import coarse_grain, extreme_states
from .simplex import DEFAULT_MAX_ITER, OPTIMAL, solve_lp
from .table import ProbabilityTable

STRICT = "strict"
COARSE = "coarse"
DEFAULT_MAX_STATES = 24


@dataclass(frozen=True)
class DistinguishabilityReport:
    """``pairs`` maps each witnessed state to the table rows forming its outcome.

    In strict mode every outcome is a single row; in coarse mode it is the
    coarse-grained union of rows in the state's support.
    """

    N: int
    mode: str
    measurement: str | None
    pairs: tuple[tuple[int, tuple[int, ...]], ...]
    Z: int
    K: int
    state_names: tuple[str, ...]
    outcome_names: tuple[str, ...]

    @property
    def classical(self) -> bool:
        return self.K == self.N

    @property
    def chain_holds(self) -> bool:
        ok = self.Z >= self.K >= self.N
        if self.classical:
            ok = ok and self.Z == self.K
        return ok

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "mode": self.mode,
            "witness": {
                "measurement": self.measurement,
                "pairs": [
                    [self.state_names[j], "+".join(self.outcome_names[i] for i in rows)]
                    for j, rows in self.pairs
                ],
            },
            "Z": self.Z,
            "K": self.K,
            "chain_holds": self.chain_holds,
            "classical": self.classical,
        }


def _max_matching(adj: list[list[int]]) -> dict[int, int]:
    """Augmenting-path bipartite matching; returns state -> row."""
    owner: dict[int, int] = {}

    def augment(j, seen):
        for i in adj[j]:
            if i in seen:
                continue
            seen.add(i)
            if i not in owner or augment(owner[i], seen):
                owner[i] = j
                return True
        return False

    for j in range(len(adj)):
        augment(j, set())
    return {j: i for i, j in owner.items()}


def _strict(table: ProbabilityTable, states: Sequence[int]):
    arith = table.arith
    p = table.entries
    best = (0, None, ())
    for k, m in enumerate(table.layout.measurements):
        rows = table.layout.rows_of(k)
        adj = [[i for i in rows if arith.eq(p[i, j], 1)] for j in states]
        match = _max_matching(adj)
        if len(match) > best[0]:
            pairs = tuple(sorted((states[a], (i,)) for a, i in match.items()))
            best = (len(match), m.name, pairs)
    return best


def _disjoint_search(supports: list[frozenset]):
    """Largest family of pairwise disjoint supports (indices into ``supports``)."""
    order = sorted(range(len(supports)), key=lambda a: (len(supports[a]), a))
    universe = len(frozenset().union(*supports)) if supports else 0
    best: list[int] = []

    def search(pos, chosen, used):
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        remaining = len(order) - pos
        free = universe - len(used)
        if len(chosen) + min(remaining, free) <= len(best):
            return
        for q in range(pos, len(order)):
            a = order[q]
            if supports[a].isdisjoint(used):
                chosen.append(a)
                search(q + 1, chosen, used | supports[a])
                chosen.pop()
                if len(chosen) + min(len(order) - q - 1, universe - len(used)) <= len(best):
                    return

    search(0, [], frozenset())
    return sorted(best)


def _coarse(table: ProbabilityTable, states: Sequence[int], limit: int):
    if len(states) > limit:
        raise SearchBudgetExceeded(
            f"coarse-mode search over {len(states)} states exceeds the limit of {limit}"
        )
    arith = table.arith
    p = table.entries
    best = (0, None, ())
    for k, m in enumerate(table.layout.measurements):
        rows = table.layout.rows_of(k)
        supports = [frozenset(i for i in rows if not arith.is_zero(p[i, j])) for j in states]
        chosen = _disjoint_search(supports)
        if len(chosen) > best[0]:
            pairs = tuple(sorted((states[a], tuple(sorted(supports[a]))) for a in chosen))
            best = (len(chosen), m.name, pairs)
    return best


def max_distinguishable(
    table: ProbabilityTable,
    f: Factorization,
    mode: str = STRICT,
    *,
    max_states: int = DEFAULT_MAX_STATES,
    Z: int | None = None,
) -> DistinguishabilityReport:
    """Maximal number N of one-shot distinguishable states.

    ``strict`` looks for an identity submatrix inside one measurement's rows
    (maximum bipartite matching on the entries equal to 1). ``coarse`` also
    allows merging outcomes of that measurement, which amounts to finding
    the most states with pairwise disjoint supports.
    """
    states = list(range(table.M))
    if mode == STRICT:
        N, meas, pairs = _strict(table, states)
    elif mode == COARSE:
        N, meas, pairs = _coarse(table, states, max_states)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if Z is None:
        Z = len(_distinct(extreme_states(f), f))
    return DistinguishabilityReport(
        N=N,
        mode=mode,
        measurement=meas,
        pairs=pairs,
        Z=Z,
        K=f.K,
        state_names=table.state_names,
        outcome_names=tuple(table.layout.outcome_name(i) for i in range(table.L)),
    )


def _distinct(indices, f):
    arith = f.arith
    reps = []
    for j in indices:
        if not any(arith.all_zero(f.u[:, r] - f.u[:, j]) for r in reps):
            reps.append(j)
    return reps


def witness_submatrix(table: ProbabilityTable, report: DistinguishabilityReport) -> np.ndarray:
    """D x D matrix of (coarse-grained) witness outcome probabilities; identity by construction."""
    p = table.entries
    D = len(report.pairs)
    out = table.arith.zeros((D, D))
    for a, (_, rows) in enumerate(report.pairs):
        for b, (j, _) in enumerate(report.pairs):
            out[a, b] = sum((p[i, j] for i in rows), table.arith.scalar(0))
    return out


def _witness_for(table, states):
    """(measurement name, {state: rows}) covering all of ``states``, or None."""
    N, meas, pairs = _strict(table, states)
    if N < len(states):
        N, meas, pairs = _coarse(table, states, max(DEFAULT_MAX_STATES, len(states)))
    if N < len(states):
        return None
    return meas, dict(pairs)


def max_weight_through(f: Factorization, point, state: int, max_iter: int = DEFAULT_MAX_ITER):
    """Largest ``mu`` with ``point = mu * s_state + (1 - mu) * s**`` and ``s**`` in the hull of all states.

    Duplicates of ``s_state`` count towards ``mu``. Returns ``None`` if the
    point is outside the convex hull of the states.
    """
    arith = f.arith
    K, M = f.u.shape
    A = arith.zeros((K + 1, M))
    A[:K] = f.u
    A[K] = arith.scalar(1)
    b = arith.zeros(K + 1)
    b[:K] = arith.array(point)
    b[K] = arith.scalar(1)
    target = f.u[:, state]
    c = arith.zeros(M)
    for j in range(M):
        if arith.all_zero(f.u[:, j] - target):
            c[j] = arith.scalar(-1)
    res = solve_lp(c, A, b, arith, max_iter)
    if res.status != OPTIMAL:
        return None
    return -res.value


def boundary_witness(
    table: ProbabilityTable,
    f: Factorization,
    distinguishable: Sequence[int],
    dropped: int,
    weights: Sequence,
    max_iter: int = DEFAULT_MAX_ITER,
) -> OutcomeVector:
    """Outcome vector certifying that a mixture of D-1 distinguishable states is a boundary point.

    The mixture ``s = sum w_k s_k`` over ``distinguishable`` minus ``dropped``
    satisfies ``r . s = 0`` while ``r . s_dropped = 1``, so no proper convex
    decomposition of ``s`` can put weight on ``s_dropped``; this is also
    confirmed by an LP maximizing that weight.
    """
    arith = f.arith
    states = [int(j) for j in distinguishable]
    if len(set(states)) != len(states) or dropped not in states:
        raise NotDistinguishable("distinguishable states must be distinct and include the dropped state")
    rest = [j for j in states if j != dropped]
    w = [arith.scalar(v) for v in weights]
    if len(w) != len(rest):
        raise InvalidWeights(f"expected {len(rest)} weights, got {len(w)}")
    if any(v < -arith.eps for v in w) or not arith.eq(sum(w, arith.scalar(0)), 1):
        raise InvalidWeights("weights must be nonnegative and sum to 1")
    found = _witness_for(table, states)
    if found is None:
        names = ", ".join(table.state_names[j] for j in states)
        raise NotDistinguishable(f"no measurement distinguishes {{{names}}} with certainty")
    _, rows = found
    r = coarse_grain([f.outcome_vector(i) for i in rows[dropped]])
    point = arith.zeros(f.K)
    for v, j in zip(w, rest):
        point = point + v * f.u[:, j]
    if not (arith.is_zero(r.coords @ point) and arith.eq(r.coords @ f.u[:, dropped], 1)):
        raise InconsistentTable("witness outcome does not separate the dropped state")
    mu = max_weight_through(f, point, dropped, max_iter)
    if mu is None:
        raise SolverFailure("mixture point not recovered as a convex combination of states")
    if not arith.is_zero(mu):
        raise InconsistentTable(f"mixture admits weight {mu} on the dropped state")
    return r
