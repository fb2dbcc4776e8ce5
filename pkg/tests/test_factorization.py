from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_force_rank, trace_probability
from probtable.errors import DegenerateTable, DimensionMismatch, SingularBasis
from probtable.factorization import (
    OutcomeVector,
    StateVector,
    factorize,
    factorize_by_outcomes,
    probability,
    rank_of,
)
from probtable.fixtures import bit_mixture_table, bit_table, qubit_table, random_table
from probtable.linalg import inverse, matrix_rank
from probtable.quantum import ket, projector
from probtable.table import ProbabilityTable, convert_mode

F = Fraction


def test_rank_bit():
    assert rank_of(bit_table()) == 2


def test_rank_bit_mixture_matches_minor_enumeration():
    t = bit_mixture_table()
    assert rank_of(t) == brute_force_rank(t.entries.tolist()) == 2


def test_rank_qubit_is_dim_squared():
    assert rank_of(qubit_table()) == 4
    assert rank_of(qubit_table("float")) == 4


def test_float_rank_tau_override():
    t = convert_mode(bit_mixture_table(), "float")
    assert rank_of(t) == 2
    sigma = np.linalg.svd(t.entries, compute_uv=False)
    assert rank_of(t, tau=float(sigma[1]) * 1.01) == 1
    with pytest.raises(DegenerateTable):
        rank_of(t, tau=float(sigma[0]) * 2)


def test_identity_factorization_of_bit():
    f = factorize(bit_table())
    assert f.t.tolist() == [[1, 0], [0, 1]]
    assert f.u.tolist() == [[1, 0], [0, 1]]
    assert list(f.state_vector(1).coords) == [0, 1]
    assert list(f.outcome_vector(0).coords) == [1, 0]


def test_bit_mixture_state_vector():
    f = factorize(bit_mixture_table())
    assert list(f.u[:, 2]) == [F(1, 2), F(1, 2)]
    assert f.t.tolist() == [[1, 0], [0, 1]]
    assert (f.reconstruct() == f.p).all()


def test_qubit_factorization_reproduces_all_products():
    t = qubit_table()
    f = factorize(t)
    assert f.u.tolist() == np.eye(4, dtype=int).tolist()
    for i in range(6):
        for j in range(4):
            assert probability(f.outcome_vector(i), f.state_vector(j)) == t.entries[i, j]


def test_probability_examples():
    r, s = OutcomeVector(np.array([1, 0]), "r"), StateVector(np.array([0, 1]), "s")
    assert probability(r, s) == 0
    assert probability(r, StateVector(np.array([1, 0]), "s")) == 1
    with pytest.raises(DimensionMismatch):
        probability(r, StateVector(np.array([1, 0, 0]), "s"))


def test_qubit_plus_x_on_zero_is_half():
    t = qubit_table()
    f = factorize(t)
    row = t.layout.find_row("X", "+x")
    expected = trace_probability(projector(ket(1, 1)), projector(ket(1, 0)))
    assert expected == pytest.approx(0.5)
    assert probability(f.outcome_vector(row), f.state_vector(0)) == F(1, 2)


def test_blocks_and_pivots():
    t = bit_mixture_table()
    f = factorize(t)
    assert f.pivot_cols == (0, 1)
    assert f.a.tolist() == [[1, 0], [0, 1]]
    assert f.b.tolist() == [[F(1, 2)], [F(1, 2)]]
    assert f.c.shape == (0, 2)


def test_pivot_tie_break_prefers_lowest_row():
    t = ProbabilityTable.from_lists(
        [("A", ["a1", "a2"]), ("B", ["b1", "b2"])], ["s1", "s2"], [[1, 0], [0, 1], [1, 0], [0, 1]]
    )
    f = factorize(t)
    assert f.pivot_rows == (0, 1)


def test_user_basis_matrix():
    x = [[2, 1], [1, 1]]
    f = factorize(bit_mixture_table(), x)
    assert f.u[:, list(f.pivot_cols)].tolist() == [[2, 1], [1, 1]]
    assert (f.reconstruct() == f.p).all()


def test_singular_basis_rejected():
    with pytest.raises(SingularBasis):
        factorize(bit_table(), [[1, 1], [1, 1]])
    with pytest.raises(SingularBasis):
        factorize(bit_table(), [[1, 0, 0], [0, 1, 0], [0, 0, 1]])


def test_basis_states_option():
    t = bit_mixture_table()
    f = factorize(t, basis_states=[0, 2])
    assert f.pivot_cols == (0, 2)
    assert list(f.u[:, 1]) == [-1, 2]
    with pytest.raises(SingularBasis):
        factorize(ProbabilityTable.from_lists([("m", ["a", "b"])], ["x", "y", "z"], [[1, 1, 0], [0, 0, 1]]),
                  basis_states=[0, 1])


def test_factorize_by_outcomes_fixes_outcome_rows():
    t = qubit_table()
    v = np.eye(4, dtype=int) * 2
    f = factorize_by_outcomes(t, v)
    assert f.t[list(f.pivot_rows)].tolist() == v.tolist()
    assert (f.reconstruct() == t.entries).all()
    assert (f.u[:, list(f.pivot_cols)] == f.x).all()


def _check_invariants(f, table):
    arith = table.arith
    if arith.exact:
        assert (f.reconstruct() == table.entries).all()
    else:
        assert f.reconstruction_error() <= 1e-10
    assert (f.u[:, list(f.pivot_cols)] == f.x).all()
    assert rank_of_matrix(f.t, arith) == rank_of_matrix(f.u, arith) == f.K


def rank_of_matrix(A, arith):
    return matrix_rank(A, arith)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["exact", "float"]))
def test_reconstruction_property(seed, mode):
    t = random_table(np.random.default_rng(seed), 16, 16, mode=mode)
    _check_invariants(factorize(t), t)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_basis_freedom(seed):
    rng = np.random.default_rng(seed)
    t = random_table(rng, 10, 10)
    K = rank_of(t)
    arith = t.arith
    while True:
        x2 = arith.array(rng.integers(-3, 4, size=(K, K)).tolist())
        if rank_of_matrix(x2, arith) == K:
            break
    f1, f2 = factorize(t), factorize(t, x2)
    change = x2 @ inverse(f1.x, arith)
    assert (f2.u == change @ f1.u).all()
    assert (f2.t == f1.t @ inverse(change, arith)).all()
    assert (f1.reconstruct() == f2.reconstruct()).all()


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_rank_matches_minor_enumeration(seed):
    t = random_table(np.random.default_rng(seed), 6, 6)
    assert rank_of(t) == brute_force_rank(t.entries.tolist())
