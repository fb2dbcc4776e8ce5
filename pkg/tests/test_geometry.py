import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import grid_convex_search
from probtable.errors import DimensionMismatch, InconsistentTable, InvalidWeights, MixedMeasurements
from probtable.factorization import factorize
from probtable.fixtures import bit_mixture_table, bit_table, classical_table, qubit_table, random_table, random_weights, trit_table
from probtable.geometry import (
    analyze_geometry,
    coarse_grain,
    extreme_states,
    mix_outcomes,
    outcome_region_contains,
    region_symmetry_check,
    trivial_vector,
)
from probtable.numeric import Arith

F = Fraction


def _extremes(f):
    return [f.state_vector(j) for j in extreme_states(f)]


def test_trivial_vector_bit():
    assert list(trivial_vector(factorize(bit_table())).n) == [1, 1]


def test_trivial_vector_trit_and_measurement_sum():
    f = factorize(trit_table())
    n = trivial_vector(f)
    assert list(n.n) == [1, 1, 1]
    assert list(f.t.sum(axis=0)) == [1, 1, 1]


def test_trivial_vector_qubit_three_sums_coincide():
    t = qubit_table()
    f = factorize(t)
    n = trivial_vector(f).n
    sums = [f.t[2 * k] + f.t[2 * k + 1] for k in range(3)]
    for s in sums:
        assert list(s) == list(n)
    for j in range(t.M):
        assert n @ f.u[:, j] == 1


def test_trivial_vector_with_nonidentity_basis():
    x = [[2, 1], [1, 1]]
    f = factorize(bit_mixture_table(), x)
    n = trivial_vector(f).n
    assert all(n @ f.u[:, j] == 1 for j in range(3))


def test_inconsistent_table_detected():
    f = factorize(bit_table())
    broken = f.t.copy()
    broken[0, 0] = F(2)
    g = type(f)(f.K, broken, f.u, f.x, f.pivot_rows, f.pivot_cols, f.p, f.layout, f.state_names, f.mode, f.tolerance)
    with pytest.raises(InconsistentTable):
        trivial_vector(g)


def test_extreme_states_examples():
    assert extreme_states(factorize(bit_mixture_table())) == (0, 1)
    assert extreme_states(factorize(trit_table())) == (0, 1, 2)


def test_qubit_states_all_extreme_grid_cross_check():
    f = factorize(qubit_table())
    assert extreme_states(f) == (0, 1, 2, 3)
    U = f.u.astype(float)
    for j in range(4):
        others = [k for k in range(4) if k != j]
        assert grid_convex_search(U[:, others], U[:, j]) is None


def test_grid_oracle_agrees_on_interior_point():
    f = factorize(bit_mixture_table())
    U = f.u.astype(float)
    assert grid_convex_search(U[:, [0, 1]], U[:, 2]) is not None


def test_duplicate_states_inherit_classification():
    from probtable.table import ProbabilityTable

    t = ProbabilityTable.from_lists([("m", ["a", "b"])], ["x", "x2", "y", "mid"],
                                    [[1, 1, 0, F(1, 2)], [0, 0, 1, F(1, 2)]])
    f = factorize(t)
    assert extreme_states(f) == (0, 1, 2)
    assert analyze_geometry(f).Z == 2


def test_mix_outcomes_examples():
    f = factorize(bit_table())
    r1, r2 = f.outcome_vector(0), f.outcome_vector(1)
    assert list(mix_outcomes([("1/2", r1), ("1/2", r2)]).coords) == [F(1, 2), F(1, 2)]
    assert list(mix_outcomes([], dim=3).coords) == [0, 0, 0]
    with pytest.raises(InvalidWeights):
        mix_outcomes([("3/4", r1), ("1/2", r2)])
    with pytest.raises(InvalidWeights):
        mix_outcomes([("-1/4", r1)])


def test_mix_outcomes_qubit_matches_table_rows():
    t = qubit_table()
    f = factorize(t)
    pz, px = t.layout.find_row("Z", "+z"), t.layout.find_row("X", "+x")
    r = mix_outcomes([("1/3", f.outcome_vector(pz)), ("1/3", f.outcome_vector(px))])
    for j in range(t.M):
        assert r.coords @ f.u[:, j] == F(1, 3) * (t.entries[pz, j] + t.entries[px, j])


def test_coarse_grain_examples():
    f = factorize(bit_table())
    assert list(coarse_grain(f.outcomes()).coords) == [1, 1]
    assert list(coarse_grain([f.outcome_vector(0)]).coords) == [1, 0]
    t = trit_table()
    ft = factorize(t)
    r = coarse_grain([ft.outcome_vector(0), ft.outcome_vector(2)])
    for j in range(3):
        assert r.coords @ ft.u[:, j] == t.entries[0, j] + t.entries[2, j]


def test_coarse_grain_rejects_mixed_and_duplicates():
    f = factorize(qubit_table())
    with pytest.raises(MixedMeasurements):
        coarse_grain([f.outcome_vector(0), f.outcome_vector(2)])
    with pytest.raises(MixedMeasurements):
        coarse_grain([f.outcome_vector(0), f.outcome_vector(0)])


def test_region_examples_bit():
    f = factorize(bit_table())
    E = _extremes(f)
    n = trivial_vector(f)
    assert outcome_region_contains(n, E)
    assert outcome_region_contains([0, 0], E)
    assert not outcome_region_contains([F(6, 5), 0], E)
    with pytest.raises(DimensionMismatch):
        outcome_region_contains([0, 0, 0], E)


def test_region_symmetry_examples():
    f = factorize(bit_table())
    E, n = _extremes(f), trivial_vector(f)
    assert outcome_region_contains([F(3, 10), F(9, 10)], E)
    assert outcome_region_contains([F(7, 10), F(1, 10)], E)
    assert region_symmetry_check([F(3, 10), F(9, 10)], E, n)
    assert not outcome_region_contains([F(3, 2), F(1, 2)], E)
    assert region_symmetry_check([F(3, 2), F(1, 2)], E, n)


def test_region_symmetry_qubit_random(rng):
    f = factorize(qubit_table("float"))
    E, n = _extremes(f), trivial_vector(f)
    arith = Arith("float", 1e-9)
    for _ in range(100):
        c = rng.uniform(-0.5, 1.5, size=4)
        assert region_symmetry_check(c, E, n, arith)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_classical_region_is_unit_hypercube(d):
    f = factorize(classical_table(d))
    E = _extremes(f)
    grid = [F(k, 4) for k in range(-2, 7)]
    for point in itertools.product(grid, repeat=d):
        expected = all(0 <= c <= 1 for c in point)
        assert outcome_region_contains(list(point), E) == expected


def _random_geometry_checks(t, rng):
    f = factorize(t)
    geo = analyze_geometry(f)
    arith = f.arith
    n = geo.n.n
    tol = 0 if arith.exact else 1e-10
    assert geo.hyperplane_max_residual <= tol
    for k in range(len(t.layout.measurements)):
        rows = t.layout.rows_of(k)
        assert arith.max_abs(f.t[rows.start:rows.stop].sum(axis=0) - n) <= max(tol, arith.eps)
    E = [f.state_vector(j) for j in geo.extreme_state_indices]
    for i in range(f.L):
        assert outcome_region_contains(f.outcome_vector(i), E, arith)
        assert outcome_region_contains(n - f.t[i], E, arith)
    # every non-extreme state is certified as a mixture of extremes
    for j, ws in geo.mixtures.items():
        point = sum((w * f.u[:, e] for e, w in ws.items()), arith.zeros(f.K))
        assert arith.max_abs(point - f.u[:, j]) <= max(tol, 1e-9)
    # mixture closure: random mixed states against outcome vectors
    for _ in range(5):
        w = random_weights(rng, len(E))
        s = sum((arith.scalar(wk) * e.coords for wk, e in zip(w, E)), arith.zeros(f.K))
        for i in range(f.L):
            v = f.t[i] @ s
            assert arith.le(0, v) and arith.le(v, 1)
    assert geo.Z >= geo.K


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["exact", "float"]))
def test_geometry_invariants_on_random_tables(seed, mode):
    rng = np.random.default_rng(seed)
    _random_geometry_checks(random_table(rng, 12, 12, mode=mode), rng)


def test_geometry_report_export():
    doc = analyze_geometry(factorize(bit_mixture_table())).to_dict()
    assert doc["K"] == 2 and doc["Z"] == 2
    assert doc["n"] == ["1", "1"]
    assert doc["extreme_states"] == ["s1", "s2"]
    assert doc["hyperplane_max_residual"] == 0.0
    assert {h["offset"] for h in doc["halfspaces"]} == {0, 1}
    assert doc["mixtures"] == {"s3": {"s1": "1/2", "s2": "1/2"}}
