import json
from fractions import Fraction

import numpy as np
import pytest

from oracles import trace_probability
from probtable.errors import InvalidModel, NotHermitian, NotSpanning, TableSyntaxError
from probtable.factorization import factorize
from probtable.geometry import trivial_vector
from probtable.quantum import (
    QuantumModel,
    generate_table,
    gram_schmidt_basis,
    hermitian_basis,
    ket,
    model_to_dict,
    parse_model,
    projector,
    qubit_fixture,
    random_model,
    reconstruct,
    trace_inner,
    vectorize,
)

H = 1 / np.sqrt(2)


@pytest.mark.parametrize("dim", [1, 2, 3, 4])
def test_basis_orthonormal_hermitian(dim):
    basis = hermitian_basis(dim)
    assert len(basis) == dim * dim
    for B in basis:
        assert np.allclose(B, B.conj().T)
    gram = np.array([[trace_inner(A, B) for B in basis] for A in basis])
    assert np.allclose(gram, np.eye(dim * dim), atol=1e-15)


def test_basis_order_qubit():
    B = hermitian_basis(2)
    assert np.allclose(B[0], [[1, 0], [0, 0]])
    assert np.allclose(B[1], [[0, 0], [0, 1]])
    assert np.allclose(B[2], [[0, H], [H, 0]])
    assert np.allclose(B[3], [[0, 1j * H], [-1j * H, 0]])


def test_vectorize_known_operators():
    B = hermitian_basis(2)
    assert np.allclose(vectorize(np.eye(2), B), [1, 1, 0, 0])
    assert np.allclose(vectorize(projector(ket(1, 0)), B), [1, 0, 0, 0])
    assert np.allclose(vectorize(projector(ket(H, H)), B), [0.5, 0.5, H, 0])
    c = vectorize(projector(ket(H, 1j * H)), B)
    assert np.allclose(np.abs(c), [0.5, 0.5, 0, H])


def test_vectorize_roundtrip_and_rejects():
    rng = np.random.default_rng(3)
    B = hermitian_basis(3)
    G = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    A = G + G.conj().T
    assert np.allclose(reconstruct(vectorize(A, B), B), A)
    with pytest.raises(NotHermitian):
        vectorize(G, B)
    with pytest.raises(NotHermitian):
        vectorize(np.eye(2), B)


def test_gram_schmidt_custom_basis():
    # Pauli-style operators span the qubit operator space
    ops = [np.eye(2), [[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]]
    basis = gram_schmidt_basis(ops)
    gram = np.array([[trace_inner(A, B) for B in basis] for A in basis])
    assert np.allclose(gram, np.eye(4))
    model = qubit_fixture()
    custom = QuantumModel(2, model.states, model.povms, model.state_names, model.outcome_names, tuple(basis))
    g1, g2 = generate_table(model), generate_table(custom)
    assert np.allclose(g1.table.entries, g2.table.entries, atol=1e-14)
    assert g2.trace_rule_deviation < 1e-12
    with pytest.raises(NotSpanning):
        gram_schmidt_basis(ops[:3])
    with pytest.raises(NotHermitian):
        gram_schmidt_basis([[[0, 1], [0, 0]]])


def test_qubit_fixture_table():
    g = generate_table(qubit_fixture())
    p = g.table.entries
    assert np.allclose(p[:, 0], [1, 0, 0.5, 0.5, 0.5, 0.5])
    assert np.allclose(p[:, 2], [0.5, 0.5, 1, 0, 0.5, 0.5])
    assert g.trace_rule_deviation <= 1e-12
    assert factorize(g.table).K == 4


def test_qubit_fixture_exact_snap():
    g = generate_table(qubit_fixture(), mode="exact")
    assert g.table.mode == "exact"
    assert g.table.entries[0, 2] == Fraction(1, 2)
    f = factorize(g.table)
    assert f.K == 4
    assert (f.reconstruct() == g.table.entries).all()
    n = trivial_vector(f)
    assert all(n.n @ f.u[:, j] == 1 for j in range(4))


@pytest.mark.parametrize("dim", [2, 3])
def test_trace_rule_matches_oracle(dim):
    rng = np.random.default_rng(dim)
    model = random_model(dim, 5, 4, rng)
    g = generate_table(model)
    elems = [A for _, es in model.povms for A in es]
    for i, A in enumerate(elems):
        for j, rho in enumerate(model.states):
            assert abs(g.table.entries[i, j] - trace_probability(A, rho)) < 1e-12
            assert abs(g.r[i] @ g.s[:, j] - trace_probability(A, rho)) < 1e-12
    assert factorize(g.table).K <= dim * dim


def test_invalid_models():
    zero = projector(ket(1, 0))
    Z = ("Z", (zero, projector(ket(0, 1))))
    with pytest.raises(InvalidModel, match="trace"):
        QuantumModel(2, (2 * zero,), (Z,))
    with pytest.raises(InvalidModel, match="positive"):
        QuantumModel(2, (np.diag([1.5, -0.5]),), (Z,))
    with pytest.raises(InvalidModel, match="identity"):
        QuantumModel(2, (zero,), (("Z", (zero, zero)),))
    with pytest.raises(InvalidModel, match="Hermitian"):
        QuantumModel(2, (np.array([[1, 1], [0, 0]]),), (Z,))
    with pytest.raises(InvalidModel, match="shape"):
        QuantumModel(2, (np.eye(3) / 3,), (Z,))


def test_model_json_roundtrip():
    model = qubit_fixture()
    text = json.dumps(model_to_dict(model))
    back = parse_model(text)
    assert back.state_names == model.state_names
    assert back.outcome_names == model.outcome_names
    assert np.allclose(generate_table(back).table.entries, generate_table(model).table.entries)
    with pytest.raises(TableSyntaxError):
        parse_model('{"dim": 2, "states": [[[1, 0]]], "povms": []}')
    with pytest.raises(TableSyntaxError):
        parse_model("not json")
