"""Affine maps between state sets, their linear form and the dual outcome map."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InconsistentTable, OutOfDomain, TableSyntaxError
from .factorization import Factorization, OutcomeVector, StateVector
from .numeric import EXACT, Arith, decode_matrix, encode_matrix


@dataclass(frozen=True, eq=False)
class StateMap:
    """``s -> F s + g`` together with its linear form ``C = F + g n'^T``.

    ``domain`` is ``None`` for a total map, otherwise the tuple of source
    state indices the map accepts.
    """

    F: np.ndarray
    g: np.ndarray
    C: np.ndarray
    source_n: np.ndarray
    target_n: np.ndarray | None
    domain: tuple[int, ...] | None
    arith: Arith

    @property
    def shape(self) -> tuple[int, int]:
        return self.C.shape

    def to_dict(self) -> dict:
        doc = {
            "F": encode_matrix(self.F),
            "g": encode_matrix(self.g),
            "C": encode_matrix(self.C),
            "domain": "total" if self.domain is None else list(self.domain),
        }
        if self.target_n is not None:
            ok, residual = check_trivial_constraint(self)
            doc["trivial_constraint"] = {"holds": ok, "residual": residual}
        return doc


def _vec(v) -> np.ndarray:
    return np.asarray(v.coords if hasattr(v, "coords") else v)


def linearize(
    F,
    g,
    source_n,
    *,
    target_n=None,
    source_states=None,
    domain=None,
    arith: Arith | None = None,
) -> StateMap:
    """Build the linear form of an affine state map.

    ``source_states`` (a factorization or K' x M matrix of state columns) is
    used to certify ``C s = F s + g`` on every source state in the domain.
    """
    if arith is None:
        arith = Arith(EXACT, 0.0) if np.asarray(_vec(source_n)).dtype == object else Arith("float", 1e-12)
    F = arith.array(F)
    g = arith.array(g)
    n1 = arith.array(_vec(source_n))
    if F.ndim != 2 or g.shape != (F.shape[0],) or n1.shape != (F.shape[1],):
        raise DimensionMismatch(f"F is {F.shape}, g is {g.shape}, source n is {n1.shape}")
    n2 = None if target_n is None else arith.array(_vec(target_n))
    if n2 is not None and n2.shape != (F.shape[0],):
        raise DimensionMismatch(f"target n has shape {n2.shape}, expected {(F.shape[0],)}")
    C = F + np.outer(g, n1)
    dom = None if domain in (None, "total") else tuple(int(j) for j in domain)
    smap = StateMap(F, g, C, n1, n2, dom, arith)
    if source_states is not None:
        U = source_states.u if isinstance(source_states, Factorization) else np.asarray(source_states)
        if U.shape[0] != F.shape[1]:
            raise DimensionMismatch(f"source states have dimension {U.shape[0]}, map expects {F.shape[1]}")
        cols = range(U.shape[1]) if dom is None else dom
        for j in cols:
            s = arith.array(U[:, j])
            dev = arith.max_abs(C @ s - (F @ s + g))
            if not arith.le(dev, 0):
                raise InconsistentTable(
                    f"source state {j} is off the hyperplane n'.s = 1 (affine/linear deviation {dev:.3g})"
                )
    return smap


def apply(smap: StateMap, s) -> StateVector:
    """Image ``C s`` of a source state."""
    coords = smap.arith.array(_vec(s))
    if coords.shape != (smap.C.shape[1],):
        raise DimensionMismatch(f"state has dimension {coords.shape}, map expects {smap.C.shape[1]}")
    if smap.domain is not None:
        idx = getattr(s, "index", None)
        if idx is None or idx not in smap.domain:
            raise OutOfDomain(f"state {getattr(s, 'label', idx)!r} is outside the map's domain")
    return StateVector(smap.C @ coords, f"C({getattr(s, 'label', 's')})")


def dual_map(smap: StateMap, r) -> OutcomeVector:
    """Pullback ``C^T r`` of a target outcome vector."""
    coords = smap.arith.array(_vec(r))
    if coords.shape != (smap.C.shape[0],):
        raise DimensionMismatch(f"outcome has dimension {coords.shape}, map target is {smap.C.shape[0]}")
    return OutcomeVector(smap.C.T @ coords, f"C^T({getattr(r, 'label', 'r')})")


def check_trivial_constraint(smap: StateMap, target_n=None) -> tuple[bool, float]:
    """Whether ``C^T n'' = n'``; returns the verdict and the max-abs residual."""
    n2 = smap.target_n if target_n is None else smap.arith.array(_vec(target_n))
    if n2 is None:
        raise DimensionMismatch("no target trivial vector given")
    if n2.shape != (smap.C.shape[0],):
        raise DimensionMismatch(f"target n has shape {n2.shape}")
    residual = smap.arith.max_abs(smap.C.T @ n2 - smap.source_n)
    return smap.arith.le(residual, 0), residual


def positivity_violations(smap: StateMap, source: Factorization, target: Factorization) -> list[tuple[int, int, object]]:
    """(source state, target outcome row, probability) triples where an image leaves [0, 1]."""
    arith = smap.arith
    out = []
    cols = range(source.M) if smap.domain is None else smap.domain
    for j in cols:
        image = smap.C @ arith.array(source.u[:, j])
        for i in range(target.L):
            prob = arith.array(target.t[i]) @ image
            if not (arith.le(0, prob) and arith.le(prob, 1)):
                out.append((j, i, prob))
    return out


def parse_map(source, mode: str = EXACT) -> dict:
    """Read a map file ``{"F": ..., "g": ..., "domain": "total" | [indices]}``."""
    text = source.decode("utf-8") if isinstance(source, bytes) else source if isinstance(source, str) else source.read()
    try:
        doc = json.loads(text)
        arith = Arith(mode, 0.0 if mode == EXACT else 1e-12)
        F = decode_matrix(doc["F"], arith)
        g = decode_matrix(doc["g"], arith)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise TableSyntaxError(f"invalid map file: {exc}") from exc
    domain = doc.get("domain", "total")
    if domain != "total" and not (isinstance(domain, list) and all(isinstance(j, (int, str)) for j in domain)):
        raise TableSyntaxError("'domain' must be 'total' or a list of state indices or names")
    return {"F": F, "g": g, "domain": domain}
