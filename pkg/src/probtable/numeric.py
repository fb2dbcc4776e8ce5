"""Scalar handling for the two numeric modes.

Exact mode stores entries as :class:`fractions.Fraction` inside numpy
``object`` arrays; float mode uses ``float64`` arrays. Everything downstream
goes through an :class:`Arith` instance so comparisons honour the mode's
tolerance.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational, Real

import numpy as np

EXACT = "exact"
FLOAT = "float"
MODES = (EXACT, FLOAT)
DEFAULT_TOL = 1e-9


def parse_scalar(value, mode: str):
    """Convert a JSON/CSV token into a scalar of ``mode``.

    Raises ``ValueError`` for anything that is not a finite number.
    """
    if isinstance(value, bool):
        raise ValueError(f"boolean is not a probability: {value!r}")
    if mode == EXACT:
        if isinstance(value, (int, Rational)):
            return Fraction(value)
        if isinstance(value, float):
            if not math.isfinite(value):
                raise ValueError(f"non-finite value {value!r}")
            return Fraction(repr(value))
        if isinstance(value, str):
            text = value.strip()
            if not text:
                raise ValueError("empty entry")
            return Fraction(text)
        raise ValueError(f"unsupported entry {value!r}")
    if isinstance(value, str):
        text = value.strip()
        x = float(Fraction(text)) if "/" in text else float(text)
    elif isinstance(value, Real):
        x = float(value)
    else:
        raise ValueError(f"unsupported entry {value!r}")
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {value!r}")
    return x


def format_scalar(x):
    """JSON encoding: exact scalars become ``"num/den"`` strings, floats stay numbers."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return float(x)


def simplest_fraction(lo: Fraction, hi: Fraction) -> Fraction:
    """Smallest-denominator fraction in the closed interval ``[lo, hi]``."""
    if lo > hi:
        raise ValueError("empty interval")
    fl = math.floor(lo)
    if fl == lo:
        return Fraction(fl)
    if fl + 1 <= hi:
        return Fraction(fl + 1)
    # lo and hi share the integer part; recurse on reciprocals of the fractional parts
    rest = simplest_fraction(1 / (hi - fl), 1 / (lo - fl))
    return fl + 1 / rest


def snap(x: float, tol: float) -> Fraction:
    """Simplest rational within ``tol`` of ``x``."""
    fx = Fraction(x)
    t = Fraction(tol)
    return simplest_fraction(fx - t, fx + t)


@dataclass(frozen=True)
class Arith:
    """Mode-aware comparisons and array construction."""

    mode: str = EXACT
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown numeric mode {self.mode!r}")
        if self.tol < 0 or not math.isfinite(self.tol):
            raise ValueError("tolerance must be a finite nonnegative float")

    @property
    def exact(self) -> bool:
        return self.mode == EXACT

    @property
    def eps(self) -> float:
        return 0.0 if self.exact else self.tol

    def scalar(self, value):
        if self.exact:
            if isinstance(value, (float, np.floating)):
                # decimal reading: 0.6 -> 3/5, not the binary expansion
                return Fraction(repr(float(value)))
            return Fraction(value)
        return float(value)

    def array(self, values) -> np.ndarray:
        if self.exact:
            arr = np.array(values, dtype=object)
            flat = arr.reshape(-1)
            for k, v in enumerate(flat):
                flat[k] = self.scalar(v)
            return arr
        return np.array(values, dtype=float)

    def zeros(self, shape) -> np.ndarray:
        if self.exact:
            out = np.empty(shape, dtype=object)
            out.fill(Fraction(0))
            return out
        return np.zeros(shape)

    def eye(self, k: int) -> np.ndarray:
        out = self.zeros((k, k))
        for i in range(k):
            out[i, i] = self.scalar(1)
        return out

    def is_zero(self, x) -> bool:
        return x == 0 if self.exact else abs(x) <= self.tol

    def eq(self, a, b) -> bool:
        return self.is_zero(a - b)

    def le(self, a, b) -> bool:
        return a <= b if self.exact else a <= b + self.tol

    def max_abs(self, arr) -> float:
        arr = np.asarray(arr)
        if arr.size == 0:
            return 0.0
        return float(max(abs(v) for v in arr.reshape(-1)))

    def all_zero(self, arr) -> bool:
        return all(self.is_zero(v) for v in np.asarray(arr).reshape(-1))


def to_float_array(arr) -> np.ndarray:
    return np.asarray(arr).astype(float)


def encode_matrix(arr) -> list:
    """Nested-list JSON encoding of a vector or matrix using :func:`format_scalar`."""
    arr = np.asarray(arr)
    if arr.ndim == 1:
        return [format_scalar(v) for v in arr]
    return [encode_matrix(row) for row in arr]


def decode_matrix(data, arith: Arith) -> np.ndarray:
    if not isinstance(data, list):
        raise ValueError("matrix must be a JSON list")
    if data and isinstance(data[0], list):
        width = len(data[0])
        if any(not isinstance(row, list) or len(row) != width for row in data):
            raise ValueError("ragged matrix")
        rows = [[parse_scalar(v, arith.mode) for v in row] for row in data]
        return arith.array(rows) if rows else arith.zeros((0, 0))
    return arith.array([parse_scalar(v, arith.mode) for v in data])


def dumps_json(obj, _level: int = 0) -> str:
    """Indented JSON that keeps lists of scalars on one line."""
    pad = "  " * (_level + 1)
    end = "  " * _level
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps_json(v, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return json.dumps(list(obj))
        items = [pad + dumps_json(v, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    return json.dumps(obj)
