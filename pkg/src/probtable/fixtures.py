"""Reference tables and random generators used by tests and demos."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .numeric import EXACT, FLOAT
from .quantum import generate_table, qubit_fixture
from .table import ProbabilityTable, convert_mode


def classical_table(d: int, mode: str = EXACT) -> ProbabilityTable:
    """d-level identity table: one d-outcome measurement, d sharp states."""
    rows = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    return ProbabilityTable.from_lists(
        [("m1", [f"r{i + 1}" for i in range(d)])], [f"s{j + 1}" for j in range(d)], rows, mode
    )


def bit_table(mode: str = EXACT) -> ProbabilityTable:
    return classical_table(2, mode)


def trit_table(mode: str = EXACT) -> ProbabilityTable:
    return classical_table(3, mode)


def bit_mixture_table(mode: str = EXACT) -> ProbabilityTable:
    """Classical bit plus the even mixture of its two states."""
    h = Fraction(1, 2)
    return ProbabilityTable.from_lists([("m1", ["r1", "r2"])], ["s1", "s2", "s3"], [[1, 0, h], [0, 1, h]], mode)


def qubit_table(mode: str = EXACT) -> ProbabilityTable:
    """6 x 4 tomography table of |0>, |1>, |+>, |+i> in the Z, X, Y bases."""
    return generate_table(qubit_fixture(), mode).table


def _random_distribution(rng, k, max_den, sharp_prob):
    if rng.random() < sharp_prob:
        out = [Fraction(0)] * k
        out[int(rng.integers(k))] = Fraction(1)
        return out
    raw = rng.integers(0, max_den + 1, size=k)
    if raw.sum() == 0:
        raw[int(rng.integers(k))] = 1
    total = int(raw.sum())
    return [Fraction(int(v), total) for v in raw]


def random_weights(rng: np.random.Generator, k: int, max_den: int = 12) -> list[Fraction]:
    """Random rational convex weights of length k."""
    return _random_distribution(rng, k, max_den, 0.0)


def random_table(
    rng: np.random.Generator,
    max_L: int = 32,
    max_M: int = 32,
    max_rank: int = 8,
    mode: str = EXACT,
    max_den: int = 6,
    sharp_prob: float = 0.3,
) -> ProbabilityTable:
    """Random valid table ``p = T W``.

    ``T`` holds random per-measurement distributions for a few hidden basis
    states, ``W`` random convex weights over them, so every column is a
    mixture of valid columns and the rank is at most the hidden count.
    """
    measurements = []
    L = 0
    target_L = int(rng.integers(1, max_L + 1))
    while L < target_L:
        k = int(min(rng.integers(1, 5), target_L - L)) if L else int(min(rng.integers(2, 5), max_L))
        name = f"m{len(measurements) + 1}"
        measurements.append((name, [f"{name}r{i + 1}" for i in range(k)]))
        L += k
    M = int(rng.integers(1, max_M + 1))
    hidden = int(rng.integers(1, max(1, min(max_rank, L, M)) + 1))
    T = np.empty((L, hidden), dtype=object)
    for h in range(hidden):
        col = []
        for _, outs in measurements:
            col.extend(_random_distribution(rng, len(outs), max_den, sharp_prob))
        T[:, h] = col
    W = np.empty((hidden, M), dtype=object)
    for j in range(M):
        if rng.random() < 0.4:
            w = [Fraction(0)] * hidden
            w[int(rng.integers(hidden))] = Fraction(1)
        else:
            w = _random_distribution(rng, hidden, max_den, 0.0)
        W[:, j] = w
    p = T @ W
    table = ProbabilityTable.from_lists(measurements, [f"s{j + 1}" for j in range(M)], p, EXACT)
    return convert_mode(table, FLOAT) if mode == FLOAT else table
