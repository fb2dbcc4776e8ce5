"""Convex geometry of the state and outcome sets of a factorization."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InconsistentTable, InvalidWeights, MixedMeasurements
from .factorization import Factorization, OutcomeVector
from .linalg import inverse
from .numeric import EXACT, FLOAT, Arith, encode_matrix, format_scalar
from .simplex import DEFAULT_MAX_ITER, convex_weights
from .table import MeasurementLayout


@dataclass(frozen=True, eq=False)
class TrivialVector:
    """Outcome vector of the single-outcome measurement: ``n . s = 1`` for all states."""

    n: np.ndarray

    @property
    def coords(self) -> np.ndarray:
        return self.n

    @property
    def label(self) -> str:
        return "trivial"


@dataclass(frozen=True)
class HalfSpace:
    """``normal . r >= 0`` when ``offset == 0``, ``normal . r <= 1`` when ``offset == 1``."""

    normal: np.ndarray = field(compare=False)
    offset: int
    state: str


@dataclass(frozen=True, eq=False)
class GeometryReport:
    K: int
    extreme_state_indices: tuple[int, ...]
    Z: int
    n: TrivialVector
    hyperplane_residuals: np.ndarray
    origin_cone: tuple[HalfSpace, ...]
    n_cone: tuple[HalfSpace, ...]
    mixtures: dict
    state_names: tuple[str, ...]

    @property
    def hyperplane_max_residual(self) -> float:
        r = self.hyperplane_residuals
        return float(max(r)) if len(r) else 0.0

    def to_dict(self) -> dict:
        return {
            "K": self.K,
            "Z": self.Z,
            "n": encode_matrix(self.n.n),
            "extreme_states": [self.state_names[j] for j in self.extreme_state_indices],
            "hyperplane_max_residual": self.hyperplane_max_residual,
            "halfspaces": [
                {"normal": encode_matrix(h.normal), "offset": h.offset, "state": h.state}
                for h in self.origin_cone + self.n_cone
            ],
            "mixtures": {
                self.state_names[j]: {self.state_names[e]: format_scalar(w) for e, w in ws.items()}
                for j, ws in self.mixtures.items()
            },
        }


def _arith_for(arr, tol=None) -> Arith:
    arr = np.asarray(arr)
    if arr.dtype == object:
        return Arith(EXACT, 0.0 if tol is None else tol)
    return Arith(FLOAT, 1e-9 if tol is None else tol)


def _coords(v) -> np.ndarray:
    return np.asarray(v.coords if hasattr(v, "coords") else v)


def trivial_vector(f: Factorization, layout: MeasurementLayout | None = None) -> TrivialVector:
    """``n^T = q^T x^{-1}`` with ``q`` all ones, cross-checked against every measurement's outcome sum."""
    arith = f.arith
    layout = f.layout if layout is None else layout
    xinv = inverse(f.x, arith)
    n = np.full(f.K, arith.scalar(1), dtype=xinv.dtype) @ xinv
    for k, m in enumerate(layout.measurements):
        rows = layout.rows_of(k)
        total = f.t[rows.start:rows.stop].sum(axis=0)
        dev = arith.max_abs(total - n)
        if not arith.le(dev, 0):
            raise InconsistentTable(
                f"outcome vectors of measurement {m.name} sum to {encode_matrix(total)}, "
                f"not the trivial vector {encode_matrix(n)} (deviation {dev:.3g})"
            )
    return TrivialVector(n)


def distinct_groups(vectors: np.ndarray, arith: Arith) -> list[list[int]]:
    """Group column indices of ``vectors`` whose columns coincide (within tolerance)."""
    groups: list[list[int]] = []
    for j in range(vectors.shape[1]):
        for g in groups:
            if arith.all_zero(vectors[:, g[0]] - vectors[:, j]):
                g.append(j)
                break
        else:
            groups.append([j])
    return groups


def extreme_states(f: Factorization, max_iter: int = DEFAULT_MAX_ITER) -> tuple[int, ...]:
    """Indices of states that are not convex combinations of the other states.

    Each distinct point is tested once with an LP feasibility problem;
    duplicate columns share their representative's verdict.
    """
    return _classify(f, max_iter)[0]


def _classify(f, max_iter):
    arith = f.arith
    groups = distinct_groups(f.u, arith)
    reps = [g[0] for g in groups]
    extreme_groups = []
    for k, j in enumerate(reps):
        others = [r for r in reps if r != j]
        if convex_weights(f.u[:, others], f.u[:, j], arith, max_iter) is None:
            extreme_groups.append(k)
    indices = sorted(i for k in extreme_groups for i in groups[k])
    return tuple(indices), groups, [reps[k] for k in extreme_groups]


def mix_outcomes(terms, dim: int | None = None, arith: Arith | None = None) -> OutcomeVector:
    """``sum w_k r_k`` with ``w_k >= 0`` and ``sum w_k <= 1``.

    With no terms the result is the null outcome of dimension ``dim``.
    """
    terms = list(terms)
    if not terms:
        if dim is None:
            raise DimensionMismatch("an empty mixture needs an explicit dimension")
        arith = arith or Arith(EXACT, 0.0)
        return OutcomeVector(arith.zeros(dim), "null")
    if arith is None:
        arith = _arith_for(_coords(terms[0][1]))
    dims = {len(_coords(r)) for _, r in terms}
    if len(dims) != 1 or (dim is not None and dims != {dim}):
        raise DimensionMismatch(f"outcome vectors have dimensions {sorted(dims)}")
    K = dims.pop()
    total_w = arith.scalar(0)
    out = arith.zeros(K)
    labels = []
    for w, r in terms:
        w = arith.scalar(w)
        if w < -arith.eps:
            raise InvalidWeights(f"negative weight {format_scalar(w)}")
        total_w = total_w + w
        out = out + w * arith.array(_coords(r))
        labels.append(f"{format_scalar(w)}*{getattr(r, 'label', 'r')}")
    if not arith.le(total_w, 1):
        raise InvalidWeights(f"weights sum to {format_scalar(total_w)} > 1")
    return OutcomeVector(out, " + ".join(labels))


def coarse_grain(rows) -> OutcomeVector:
    """Sum of outcome vectors belonging to one measurement."""
    rows = list(rows)
    if not rows:
        raise MixedMeasurements("nothing to coarse-grain")
    meas = {r.measurement for r in rows}
    if None in meas:
        raise MixedMeasurements("coarse-graining needs outcomes that carry their measurement")
    if len(meas) != 1:
        raise MixedMeasurements(f"outcomes come from different measurements: {sorted(meas)}")
    idx = [r.row for r in rows]
    if len(set(idx)) != len(idx):
        raise MixedMeasurements("duplicate outcome in coarse-graining")
    dims = {len(r.coords) for r in rows}
    if len(dims) != 1:
        raise DimensionMismatch(f"outcome vectors have dimensions {sorted(dims)}")
    total = rows[0].coords.copy()
    for r in rows[1:]:
        total = total + r.coords
    m = meas.pop()
    label = m + ":(" + " or ".join(r.label.split(":", 1)[-1] for r in rows) + ")"
    return OutcomeVector(total, label, None, m)


def _extreme_matrix(extremes) -> np.ndarray:
    if isinstance(extremes, np.ndarray):
        return extremes
    cols = [_coords(s) for s in extremes]
    return np.stack(cols, axis=1) if cols else np.zeros((0, 0))


def outcome_region_contains(candidate, extremes, arith: Arith | None = None) -> bool:
    """``0 <= candidate . s <= 1`` for every extreme state ``s``.

    ``extremes`` is a list of state vectors or a K x Z matrix of columns.
    """
    c = _coords(candidate)
    E = _extreme_matrix(extremes)
    if E.size and E.shape[0] != len(c):
        raise DimensionMismatch(f"candidate has dimension {len(c)}, states have {E.shape[0]}")
    if arith is None:
        arith = _arith_for(E)
    values = arith.array(c) @ arith.array(E)
    return all(arith.le(0, v) and arith.le(v, 1) for v in values)


def region_symmetry_check(candidate, extremes, n, arith: Arith | None = None) -> bool:
    """Membership of ``candidate`` and of its reflection ``n - candidate`` agree."""
    c = _coords(candidate)
    nn = _coords(n)
    if len(c) != len(nn):
        raise DimensionMismatch(f"candidate has dimension {len(c)}, n has {len(nn)}")
    return outcome_region_contains(c, extremes, arith) == outcome_region_contains(nn - c, extremes, arith)


def analyze_geometry(f: Factorization, max_iter: int = DEFAULT_MAX_ITER) -> GeometryReport:
    arith = f.arith
    n = trivial_vector(f)
    residuals = np.array([float(abs(n.n @ f.u[:, j] - 1)) for j in range(f.M)])
    indices, groups, ext_reps = _classify(f, max_iter)
    E = f.u[:, ext_reps]
    mixtures = {}
    ext_set = set(indices)
    for g in groups:
        if g[0] in ext_set:
            continue
        w = convex_weights(E, f.u[:, g[0]], arith, max_iter)
        if w is None:
            raise InconsistentTable(f"state {f.state_names[g[0]]} is not a mixture of the extreme states")
        ws = {ext_reps[k]: w[k] for k in range(len(ext_reps)) if not arith.is_zero(w[k])}
        for j in g:
            mixtures[j] = ws
    origin = tuple(HalfSpace(f.u[:, j].copy(), 0, f.state_names[j]) for j in ext_reps)
    top = tuple(HalfSpace(f.u[:, j].copy(), 1, f.state_names[j]) for j in ext_reps)
    return GeometryReport(
        K=f.K,
        extreme_state_indices=indices,
        Z=len(ext_reps),
        n=n,
        hyperplane_residuals=residuals,
        origin_cone=origin,
        n_cone=top,
        mixtures=mixtures,
        state_names=f.state_names,
    )
