"""Probability data tables: layout, validation, parsing and serialization."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidWeights, TableSyntaxError, ValidationError
from .numeric import DEFAULT_TOL, EXACT, FLOAT, MODES, Arith, dumps_json, format_scalar, parse_scalar, snap


@dataclass(frozen=True)
class Measurement:
    name: str
    outcomes: tuple[str, ...]


@dataclass(frozen=True)
class MeasurementLayout:
    """Partition of the table rows into measurements, in file order."""

    measurements: tuple[Measurement, ...]
    _starts: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(
            self,
            "measurements",
            tuple(Measurement(str(m.name), tuple(str(o) for o in m.outcomes)) for m in self.measurements),
        )
        if not self.measurements:
            raise ValidationError("table needs at least one measurement")
        seen = set()
        starts = []
        pos = 0
        for m in self.measurements:
            if m.name in seen:
                raise ValidationError(f"duplicate measurement name {m.name!r}", measurement=m.name)
            seen.add(m.name)
            if not m.outcomes:
                raise ValidationError(f"measurement {m.name!r} has no outcomes", measurement=m.name)
            if len(set(m.outcomes)) != len(m.outcomes):
                raise ValidationError(f"measurement {m.name!r} repeats an outcome name", measurement=m.name)
            starts.append(pos)
            pos += len(m.outcomes)
        object.__setattr__(self, "_starts", tuple(starts))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, Sequence[str]]]) -> "MeasurementLayout":
        return cls(tuple(Measurement(name, tuple(outcomes)) for name, outcomes in pairs))

    @property
    def L(self) -> int:
        return self._starts[-1] + len(self.measurements[-1].outcomes)

    def rows_of(self, m: int) -> range:
        start = self._starts[m]
        return range(start, start + len(self.measurements[m].outcomes))

    def locate(self, row: int) -> tuple[int, int]:
        """Global row index -> (measurement index, local outcome index)."""
        if not 0 <= row < self.L:
            raise IndexError(f"row {row} out of range")
        m = int(np.searchsorted(self._starts, row, side="right")) - 1
        return m, row - self._starts[m]

    def outcome_name(self, row: int) -> str:
        m, k = self.locate(row)
        return self.measurements[m].outcomes[k]

    def label(self, row: int) -> str:
        m, k = self.locate(row)
        return f"{self.measurements[m].name}:{self.measurements[m].outcomes[k]}"

    def measurement_index(self, name: str) -> int:
        for k, m in enumerate(self.measurements):
            if m.name == name:
                return k
        raise KeyError(name)

    def find_row(self, measurement: str, outcome: str) -> int:
        m = self.measurement_index(measurement)
        return self.rows_of(m)[self.measurements[m].outcomes.index(outcome)]


@dataclass(frozen=True, eq=False)
class ProbabilityTable:
    """L x M table of outcome probabilities, columns indexed by states.

    Construction validates the probability and per-measurement normalization
    invariants. In float mode entries within ``tolerance`` outside [0, 1] are
    clamped; anything further out is rejected.
    """

    layout: MeasurementLayout
    state_names: tuple[str, ...]
    entries: np.ndarray
    mode: str = EXACT
    tolerance: float = DEFAULT_TOL

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"unknown numeric mode {self.mode!r}")
        arith = Arith(self.mode, float(self.tolerance))
        object.__setattr__(self, "tolerance", float(self.tolerance))
        names = tuple(str(s) for s in self.state_names)
        object.__setattr__(self, "state_names", names)
        if not names:
            raise ValidationError("table needs at least one state")
        if len(set(names)) != len(names):
            raise ValidationError("state names must be unique")
        raw = self.entries
        if not isinstance(raw, np.ndarray):
            raw = list(raw)
            for i, row in enumerate(raw):
                if len(row) != len(names):
                    raise ValidationError(
                        f"row {i} ({self.layout.label(i) if i < self.layout.L else '?'}) has "
                        f"{len(row)} entries, expected {len(names)}",
                        row=i,
                    )
        entries = arith.array(raw)
        if entries.ndim != 2 or entries.shape != (self.layout.L, len(names)):
            raise ValidationError(
                f"entries have shape {entries.shape}, expected {(self.layout.L, len(names))}"
            )
        if not arith.exact and not np.all(np.isfinite(entries)):
            i, j = map(int, np.argwhere(~np.isfinite(entries))[0])
            raise self._entry_error("non-finite entry", i, j)
        self._check_range(entries, arith)
        self._check_normalization(entries, arith)
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    def _entry_error(self, what, i, j):
        return ValidationError(
            f"{what} at row {i} ({self.layout.label(i)}), column {j} ({self.state_names[j]})",
            row=i,
            col=j,
            outcome=self.layout.outcome_name(i),
            state=self.state_names[j],
            measurement=self.layout.measurements[self.layout.locate(i)[0]].name,
        )

    def _check_range(self, entries, arith):
        if arith.exact:
            for (i, j), v in np.ndenumerate(entries):
                if v < 0 or v > 1:
                    raise self._entry_error(f"entry {v} outside [0, 1]", i, j)
            return
        bad = np.argwhere((entries < -arith.tol) | (entries > 1 + arith.tol))
        if len(bad):
            i, j = map(int, bad[0])
            raise self._entry_error(f"entry {entries[i, j]!r} outside [0, 1]", i, j)
        np.clip(entries, 0.0, 1.0, out=entries)

    def _check_normalization(self, entries, arith):
        for k, m in enumerate(self.layout.measurements):
            rows = self.layout.rows_of(k)
            sums = entries[rows.start:rows.stop].sum(axis=0)
            for j, total in enumerate(sums):
                ok = total == 1 if arith.exact else abs(total - 1.0) <= arith.tol * len(rows)
                if not ok:
                    shown = f"{total} ({float(total):g})" if arith.exact else f"{total:g}"
                    raise ValidationError(
                        f"column {self.state_names[j]} of measurement {m.name} sums to {shown}",
                        col=j,
                        state=self.state_names[j],
                        measurement=m.name,
                    )

    @property
    def arith(self) -> Arith:
        return Arith(self.mode, self.tolerance)

    @property
    def L(self) -> int:
        return self.entries.shape[0]

    @property
    def M(self) -> int:
        return self.entries.shape[1]

    def state_index(self, name: str) -> int:
        try:
            return self.state_names.index(name)
        except ValueError:
            raise KeyError(f"unknown state {name!r}") from None

    def __eq__(self, other):
        if not isinstance(other, ProbabilityTable):
            return NotImplemented
        return (
            self.layout == other.layout
            and self.state_names == other.state_names
            and self.mode == other.mode
            and self.tolerance == other.tolerance
            and np.array_equal(self.entries, other.entries)
        )

    __hash__ = None

    @classmethod
    def from_lists(cls, measurements, states, probabilities, mode=EXACT, tolerance=DEFAULT_TOL):
        """Build from ``[(name, [outcomes]), ...]``, state names and row lists."""
        layout = MeasurementLayout.from_pairs(measurements)
        return cls(layout, tuple(states), probabilities, mode, tolerance)


def convert_mode(table: ProbabilityTable, mode: str, snap_tol: float = DEFAULT_TOL) -> ProbabilityTable:
    """Switch numeric mode; float -> exact snaps each entry to the simplest rational within ``snap_tol``."""
    if mode == table.mode:
        return table
    if mode == FLOAT:
        entries = table.entries.astype(float)
        return ProbabilityTable(table.layout, table.state_names, entries, FLOAT, table.tolerance)
    snapped = np.empty(table.entries.shape, dtype=object)
    for idx, v in np.ndenumerate(table.entries):
        snapped[idx] = snap(float(v), snap_tol)
    return ProbabilityTable(table.layout, table.state_names, snapped, EXACT, table.tolerance)


def add_mixture_state(table: ProbabilityTable, weights, name: str | None = None) -> ProbabilityTable:
    """Append a column that is the convex combination ``sum w_j p[:, j]``.

    ``weights`` is a list of ``(state index, weight)`` pairs.
    """
    arith = table.arith
    pairs = [(int(j), arith.scalar(w)) for j, w in weights]
    if not pairs:
        raise InvalidWeights("mixture needs at least one weight")
    for j, w in pairs:
        if not 0 <= j < table.M:
            raise InvalidWeights(f"state index {j} out of range")
        if w < 0 and not (not arith.exact and w >= -arith.tol):
            raise InvalidWeights(f"negative weight {format_scalar(w)} on {table.state_names[j]}")
    total = sum((w for _, w in pairs), arith.scalar(0))
    if not arith.eq(total, 1):
        raise InvalidWeights(f"weights sum to {format_scalar(total)}, not 1")
    column = arith.zeros(table.L)
    for j, w in pairs:
        column = column + w * table.entries[:, j]
    if name is None:
        k = 1
        while f"mix{k}" in table.state_names:
            k += 1
        name = f"mix{k}"
    entries = np.concatenate([table.entries, column[:, None]], axis=1)
    return ProbabilityTable(table.layout, table.state_names + (name,), entries, table.mode, table.tolerance)


# ---------------------------------------------------------------- parsing

def _read_text(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def parse_table(source, format: str = "json", mode: str | None = None, tolerance: float | None = None) -> ProbabilityTable:
    """Parse a table from bytes, text or a file object.

    ``mode`` overrides the file's numeric mode (float -> exact snaps entries);
    ``tolerance`` overrides the file's tolerance.
    """
    text = _read_text(source)
    if format == "json":
        table = _parse_json(text, tolerance)
    elif format == "csv":
        table = _parse_csv(text, mode, tolerance)
    else:
        raise ValueError(f"unknown table format {format!r}")
    if mode is not None and mode != table.mode:
        table = convert_mode(table, mode, table.tolerance)
    return table


def _parse_json(text, tolerance):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TableSyntaxError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise TableSyntaxError("table document must be a JSON object")
    for key in ("states", "measurements", "probabilities"):
        if key not in doc:
            raise TableSyntaxError(f"missing key {key!r}")
    mode = doc.get("numeric_mode", EXACT)
    if mode not in MODES:
        raise TableSyntaxError(f"numeric_mode must be 'exact' or 'float', got {mode!r}")
    tol = float(doc.get("tolerance", DEFAULT_TOL)) if tolerance is None else float(tolerance)
    states = doc["states"]
    if not isinstance(states, list) or not all(isinstance(s, str) for s in states):
        raise TableSyntaxError("'states' must be a list of strings")
    try:
        pairs = [(m["name"], m["outcomes"]) for m in doc["measurements"]]
    except (TypeError, KeyError) as exc:
        raise TableSyntaxError("each measurement needs 'name' and 'outcomes'") from exc
    if any(not isinstance(o, list) for _, o in pairs):
        raise TableSyntaxError("'outcomes' must be a list of strings")
    layout = MeasurementLayout.from_pairs(pairs)
    rows = doc["probabilities"]
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise TableSyntaxError("'probabilities' must be a list of rows")
    if len(rows) != layout.L:
        raise ValidationError(f"table has {len(rows)} rows but the measurements declare {layout.L} outcomes")
    parsed = []
    for i, row in enumerate(rows):
        if len(row) != len(states):
            raise ValidationError(
                f"row {i} ({layout.label(i)}) has {len(row)} entries, expected {len(states)}", row=i
            )
        out = []
        for j, v in enumerate(row):
            try:
                out.append(parse_scalar(v, mode))
            except (ValueError, ZeroDivisionError) as exc:
                raise TableSyntaxError(
                    f"bad entry {v!r} at row {i} ({layout.label(i)}), column {j} ({states[j]}): {exc}"
                ) from exc
        parsed.append(out)
    return ProbabilityTable(layout, tuple(states), parsed, mode, tol)


def _looks_float(token: str) -> bool:
    t = token.strip().lower()
    return any(ch in t for ch in ".e") or t in ("inf", "-inf", "nan")


def _parse_csv(text, mode, tolerance):
    reader = csv.reader(io.StringIO(text))
    rows = [r for r in reader if r and any(cell.strip() for cell in r)]
    if not rows:
        raise TableSyntaxError("empty CSV input")
    header, body = rows[0], rows[1:]
    if len(header) < 3:
        raise TableSyntaxError("CSV header needs measurement, outcome and at least one state column")
    states = [h.strip() for h in header[2:]]
    if mode is None:
        mode = FLOAT if any(_looks_float(c) for r in body for c in r[2:]) else EXACT
    pairs: list[tuple[str, list[str]]] = []
    parsed = []
    for i, r in enumerate(body):
        if len(r) != len(header):
            raise ValidationError(f"CSV row {i} has {len(r)} fields, expected {len(header)}", row=i)
        mname, oname = r[0].strip(), r[1].strip()
        if pairs and pairs[-1][0] == mname:
            pairs[-1][1].append(oname)
        elif any(p[0] == mname for p in pairs):
            raise TableSyntaxError(f"rows of measurement {mname!r} are not contiguous (row {i})")
        else:
            pairs.append((mname, [oname]))
        out = []
        for j, v in enumerate(r[2:]):
            try:
                out.append(parse_scalar(v, mode))
            except (ValueError, ZeroDivisionError) as exc:
                raise TableSyntaxError(f"bad entry {v!r} at row {i} ({mname}:{oname}), column {j} ({states[j]})") from exc
        parsed.append(out)
    tol = DEFAULT_TOL if tolerance is None else float(tolerance)
    return ProbabilityTable(MeasurementLayout.from_pairs(pairs), tuple(states), parsed, mode, tol)


def table_to_dict(table: ProbabilityTable) -> dict:
    doc = {
        "numeric_mode": table.mode,
        "states": list(table.state_names),
        "measurements": [{"name": m.name, "outcomes": list(m.outcomes)} for m in table.layout.measurements],
        "probabilities": [[format_scalar(v) for v in row] for row in table.entries],
    }
    if table.mode == FLOAT:
        doc["tolerance"] = table.tolerance
    return doc


def serialize_table(table: ProbabilityTable, format: str = "json") -> bytes:
    if format == "json":
        return (dumps_json(table_to_dict(table)) + "\n").encode("utf-8")
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["measurement", "outcome", *table.state_names])
        for i, row in enumerate(table.entries):
            m, k = table.layout.locate(i)
            meas = table.layout.measurements[m]
            cells = [str(v) if table.mode == EXACT else repr(float(v)) for v in row]
            writer.writerow([meas.name, meas.outcomes[k], *cells])
        return buf.getvalue().encode("utf-8")
    raise ValueError(f"unknown table format {format!r}")
