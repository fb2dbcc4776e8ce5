"""Probability tables from quantum states and POVMs via the trace rule.

This is the only module that touches complex numbers. Operators are
expanded in an orthonormal Hermitian basis (``tr(B_k B_l) = delta_kl``), so
``tr(A rho)`` becomes the real scalar product of coefficient vectors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidModel, NotHermitian, NotSpanning, TableSyntaxError
from .numeric import DEFAULT_TOL, EXACT, FLOAT
from .table import MeasurementLayout, ProbabilityTable, convert_mode

PSD_TOL = 1e-10
TRACE_RULE_TOL = 1e-12


def hermitian_basis(dim: int) -> list[np.ndarray]:
    """Canonical orthonormal Hermitian basis of N x N matrices.

    Order: ``E_ii`` for each i, then for each pair i < j (lexicographic)
    ``(E_ij + E_ji)/sqrt2`` followed by ``i(E_ij - E_ji)/sqrt2``.
    """
    if dim < 1:
        raise ValueError("dimension must be at least 1")
    basis = []
    for i in range(dim):
        B = np.zeros((dim, dim), dtype=complex)
        B[i, i] = 1
        basis.append(B)
    h = 1 / np.sqrt(2)
    for i in range(dim):
        for j in range(i + 1, dim):
            B = np.zeros((dim, dim), dtype=complex)
            B[i, j] = B[j, i] = h
            basis.append(B)
            B = np.zeros((dim, dim), dtype=complex)
            B[i, j] = 1j * h
            B[j, i] = -1j * h
            basis.append(B)
    return basis


def trace_inner(A: np.ndarray, B: np.ndarray) -> complex:
    return complex(np.trace(A @ B))


def gram_schmidt_basis(operators, tol: float = 1e-10) -> list[np.ndarray]:
    """Orthonormalize Hermitian ``operators`` under ``<A, B> = tr(A B)``.

    Raises :class:`NotSpanning` if they span fewer than N^2 dimensions.
    """
    ops = [np.asarray(op, dtype=complex) for op in operators]
    if not ops:
        raise NotSpanning("empty operator set")
    dim = ops[0].shape[0]
    basis: list[np.ndarray] = []
    for k, op in enumerate(ops):
        if op.shape != (dim, dim):
            raise NotSpanning(f"operator {k} has shape {op.shape}")
        if not np.allclose(op, op.conj().T, atol=tol):
            raise NotHermitian(f"operator {k} is not Hermitian")
        v = op.copy()
        for B in basis:
            v = v - trace_inner(B, v).real * B
        norm = np.sqrt(max(trace_inner(v, v).real, 0.0))
        if norm > tol:
            basis.append(v / norm)
    if len(basis) < dim * dim:
        raise NotSpanning(f"operators span {len(basis)} of {dim * dim} dimensions")
    return basis


def vectorize(operator, basis) -> np.ndarray:
    """Real coefficients ``c_k = tr(B_k A)`` of a Hermitian operator."""
    A = np.asarray(operator, dtype=complex)
    if isinstance(basis, QuantumModel):
        basis = basis.basis
    dim = basis[0].shape[0]
    if A.shape != (dim, dim):
        raise NotHermitian(f"operator has shape {A.shape}, expected {(dim, dim)}")
    if not np.allclose(A, A.conj().T, atol=PSD_TOL):
        raise NotHermitian("operator is not Hermitian")
    coeffs = np.array([trace_inner(B, A) for B in basis])
    if np.max(np.abs(coeffs.imag), initial=0.0) > PSD_TOL:
        raise NotHermitian("basis expansion has complex coefficients; basis is not Hermitian")
    return coeffs.real


def reconstruct(coeffs, basis) -> np.ndarray:
    return sum(c * B for c, B in zip(coeffs, basis))


@dataclass(frozen=True, eq=False)
class QuantumModel:
    """States and POVMs on an N-dimensional Hilbert space.

    ``povms`` is a list of ``(name, [elements])``; outcome names default to
    ``a1, a2, ...`` within each POVM.
    """

    dim: int
    states: tuple[np.ndarray, ...]
    povms: tuple[tuple[str, tuple[np.ndarray, ...]], ...]
    state_names: tuple[str, ...] = ()
    outcome_names: tuple[tuple[str, ...], ...] = ()
    basis: tuple[np.ndarray, ...] = field(default=())
    tol: float = PSD_TOL

    def __post_init__(self):
        states = tuple(np.asarray(s, dtype=complex) for s in self.states)
        povms = tuple((str(name), tuple(np.asarray(e, dtype=complex) for e in elems)) for name, elems in self.povms)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "povms", povms)
        if not self.state_names:
            object.__setattr__(self, "state_names", tuple(f"rho{j + 1}" for j in range(len(states))))
        if not self.outcome_names:
            object.__setattr__(
                self, "outcome_names", tuple(tuple(f"a{k + 1}" for k in range(len(e))) for _, e in povms)
            )
        if not self.basis:
            object.__setattr__(self, "basis", tuple(hermitian_basis(self.dim)))
        self.validate()

    def validate(self):
        N, tol = self.dim, self.tol
        eye = np.eye(N)
        if not self.states:
            raise InvalidModel("model has no states")
        if not self.povms:
            raise InvalidModel("model has no POVMs")
        if len(self.state_names) != len(self.states):
            raise InvalidModel("state_names length does not match states")
        for name, rho in zip(self.state_names, self.states):
            _check_operator(rho, N, tol, f"state {name}")
            tr = np.trace(rho)
            if abs(tr - 1) > tol:
                raise InvalidModel(f"state {name} has trace {tr.real:.6g}, not 1")
        for (name, elems), onames in zip(self.povms, self.outcome_names):
            if not elems or len(onames) != len(elems):
                raise InvalidModel(f"POVM {name} has no elements or mismatched outcome names")
            for oname, A in zip(onames, elems):
                _check_operator(A, N, tol, f"POVM {name} element {oname}")
            total = sum(elems)
            if np.max(np.abs(total - eye)) > tol:
                raise InvalidModel(f"POVM {name} elements do not sum to the identity")
        if len(self.basis) != N * N:
            raise InvalidModel(f"basis has {len(self.basis)} elements, expected {N * N}")
        gram = np.array([[trace_inner(A, B) for B in self.basis] for A in self.basis])
        if np.max(np.abs(gram - np.eye(N * N))) > tol:
            raise InvalidModel("basis is not orthonormal under tr(B_k B_l)")


def _check_operator(A, N, tol, what):
    if A.shape != (N, N):
        raise InvalidModel(f"{what} has shape {A.shape}, expected {(N, N)}")
    if np.max(np.abs(A - A.conj().T)) > tol:
        raise InvalidModel(f"{what} is not Hermitian")
    if np.min(np.linalg.eigvalsh(A)) < -tol:
        raise InvalidModel(f"{what} is not positive semidefinite")


@dataclass(frozen=True, eq=False)
class GeneratedTable:
    """Trace-rule table plus the coefficient vectors (rows of ``r``, columns of ``s``)."""

    table: ProbabilityTable
    r: np.ndarray
    s: np.ndarray
    trace_rule_deviation: float


def generate_table(
    model: QuantumModel,
    mode: str = FLOAT,
    snap_tol: float = DEFAULT_TOL,
    tolerance: float = DEFAULT_TOL,
) -> GeneratedTable:
    """Table ``p_ij = tr(A_i rho_j)`` together with its real vectorization.

    In exact mode each entry is snapped to the simplest rational within
    ``snap_tol``; tables whose snapped columns do not normalize exactly are
    rejected by table validation.
    """
    elems = [A for _, es in model.povms for A in es]
    p = np.array([[trace_inner(A, rho).real for rho in model.states] for A in elems])
    r = np.array([vectorize(A, model.basis) for A in elems])
    s = np.array([vectorize(rho, model.basis) for rho in model.states]).T
    deviation = float(np.max(np.abs(p - r @ s)))
    if deviation > TRACE_RULE_TOL:
        raise InvalidModel(f"trace rule and scalar product disagree by {deviation:.3g}")
    layout = MeasurementLayout.from_pairs(
        (name, onames) for (name, _), onames in zip(model.povms, model.outcome_names)
    )
    table = ProbabilityTable(layout, model.state_names, p, FLOAT, tolerance)
    if mode == EXACT:
        table = convert_mode(table, EXACT, snap_tol)
    return GeneratedTable(table, r, s, deviation)


# ------------------------------------------------------------ constructors

def ket(*amplitudes) -> np.ndarray:
    v = np.asarray(amplitudes, dtype=complex)
    return v / np.linalg.norm(v)


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def qubit_fixture() -> QuantumModel:
    """States |0>, |1>, |+>, |+i> measured in the Z, X and Y bases."""
    h = 1 / np.sqrt(2)
    zero, one = ket(1, 0), ket(0, 1)
    plus, minus = ket(h, h), ket(h, -h)
    plus_i, minus_i = ket(h, 1j * h), ket(h, -1j * h)
    return QuantumModel(
        dim=2,
        states=tuple(projector(v) for v in (zero, one, plus, plus_i)),
        povms=(
            ("Z", (projector(zero), projector(one))),
            ("X", (projector(plus), projector(minus))),
            ("Y", (projector(plus_i), projector(minus_i))),
        ),
        state_names=("0", "1", "+", "+i"),
        outcome_names=(("+z", "-z"), ("+x", "-x"), ("+y", "-y")),
    )


def random_density_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Mixed state from a Ginibre matrix: ``G G^dag / tr``."""
    G = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


def random_two_outcome_povm(dim: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """``(E, I - E)`` with E a random PSD operator scaled below the identity."""
    G = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    E = G @ G.conj().T
    E = E / (np.max(np.linalg.eigvalsh(E)) * (1 + rng.random()))
    E = (E + E.conj().T) / 2
    return E, np.eye(dim) - E


def random_model(dim: int, n_states: int, n_povms: int, rng: np.random.Generator) -> QuantumModel:
    return QuantumModel(
        dim=dim,
        states=tuple(random_density_matrix(dim, rng) for _ in range(n_states)),
        povms=tuple((f"M{k + 1}", random_two_outcome_povm(dim, rng)) for k in range(n_povms)),
    )


# ------------------------------------------------------------ file format

def _decode_complex_matrix(data, dim, what):
    try:
        M = np.array([[complex(float(e[0]), float(e[1])) for e in row] for row in data], dtype=complex)
    except (TypeError, ValueError, IndexError) as exc:
        raise TableSyntaxError(f"{what}: entries must be [re, im] pairs") from exc
    if M.shape != (dim, dim):
        raise TableSyntaxError(f"{what}: expected a {dim}x{dim} matrix, got {M.shape}")
    return M


def _encode_complex_matrix(M) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(M)]


def parse_model(source) -> QuantumModel:
    """Read ``{"dim": N, "states": [...], "povms": [{"name", "elements"}]}``; entries are ``[re, im]``."""
    text = source.decode("utf-8") if isinstance(source, bytes) else source if isinstance(source, str) else source.read()
    try:
        doc = json.loads(text)
        dim = int(doc["dim"])
        raw_states = doc["states"]
        raw_povms = doc["povms"]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise TableSyntaxError(f"invalid model file: {exc}") from exc
    state_names = tuple(doc.get("state_names", ())) or tuple(f"rho{j + 1}" for j in range(len(raw_states)))
    states = tuple(_decode_complex_matrix(s, dim, f"state {k}") for k, s in enumerate(raw_states))
    povms, onames = [], []
    for k, pv in enumerate(raw_povms):
        try:
            name, elems = str(pv["name"]), pv["elements"]
        except (KeyError, TypeError) as exc:
            raise TableSyntaxError(f"POVM {k} needs 'name' and 'elements'") from exc
        povms.append((name, tuple(_decode_complex_matrix(e, dim, f"POVM {name}") for e in elems)))
        onames.append(tuple(pv.get("outcomes", ())) or tuple(f"a{i + 1}" for i in range(len(elems))))
    return QuantumModel(dim, states, tuple(povms), state_names, tuple(onames))


def model_to_dict(model: QuantumModel) -> dict:
    return {
        "dim": model.dim,
        "state_names": list(model.state_names),
        "states": [_encode_complex_matrix(s) for s in model.states],
        "povms": [
            {"name": name, "outcomes": list(on), "elements": [_encode_complex_matrix(e) for e in elems]}
            for (name, elems), on in zip(model.povms, model.outcome_names)
        ],
    }
