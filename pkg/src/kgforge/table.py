"""Aligned multivariate time-series tables and their CSV round trip.

The table is the currency every pipeline stage trades in: an ordered index
(integer ticks or epoch-millisecond timestamps), typed columns, and explicit
missing cells.  Instances are immutable; every transformation returns a new
table.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from typing import Iterable, Sequence

import numpy as np

from .errors import MissingValuesError, SchemaError

NUMERIC = "numeric"
CATEGORICAL = "categorical"

DEFAULT_INDEX_COLUMN = "timestamp"


@dataclass(frozen=True)
class Column:
    """One named series: numeric cells are floats, categorical cells tokens.

    ``values`` always has the table's row count; ``None`` marks a missing cell.
    """

    name: str
    kind: str
    values: tuple

    def __post_init__(self):
        if not self.name:
            raise SchemaError("column name must be non-empty")
        if self.kind not in (NUMERIC, CATEGORICAL):
            raise SchemaError(f"unknown column kind {self.kind!r}")
        for v in self.values:
            if v is None:
                continue
            if self.kind == NUMERIC:
                if not isinstance(v, float) or not math.isfinite(v):
                    raise SchemaError(
                        f"numeric column {self.name!r} holds non-finite or "
                        f"non-float cell {v!r}"
                    )
            else:
                if not isinstance(v, str):
                    raise SchemaError(
                        f"categorical column {self.name!r} holds non-token cell {v!r}"
                    )

    @property
    def missing_count(self) -> int:
        return sum(1 for v in self.values if v is None)

    def is_complete(self) -> bool:
        return self.missing_count == 0


@dataclass(frozen=True)
class TimeSeriesTable:
    """Immutable table of aligned series over a strictly increasing index."""

    index: tuple[int, ...]
    columns: tuple[Column, ...]
    index_kind: str = "tick"  # "tick" | "timestamp" (epoch milliseconds)
    source: str = ""

    def __post_init__(self):
        t = len(self.index)
        if t == 0:
            raise SchemaError("table has zero data rows")
        for a, b in zip(self.index, self.index[1:]):
            if b <= a:
                raise SchemaError("index is not strictly increasing")
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise SchemaError("duplicate column names: " + ", ".join(dupes))
        for c in self.columns:
            if len(c.values) != t:
                raise SchemaError(
                    f"column {c.name!r} has {len(c.values)} cells, expected {t}"
                )
        if self.index_kind not in ("tick", "timestamp"):
            raise SchemaError(f"unknown index kind {self.index_kind!r}")

    # -- basic accessors ---------------------------------------------------

    @property
    def t(self) -> int:
        """Row count T."""
        return len(self.index)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    def column(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise SchemaError(f"no column named {name!r}")

    def has_missing(self) -> bool:
        return any(not c.is_complete() for c in self.columns)

    def missing_counts(self) -> dict[str, int]:
        return {c.name: c.missing_count for c in self.columns}

    def is_numeric(self) -> bool:
        return all(c.kind == NUMERIC for c in self.columns)

    # -- derived tables ----------------------------------------------------

    def select(self, names: Sequence[str]) -> "TimeSeriesTable":
        """Project onto ``names`` in the given order."""
        cols = tuple(self.column(n) for n in names)
        return replace(self, columns=cols)

    def with_column_values(self, name: str, values: Iterable) -> "TimeSeriesTable":
        new = []
        for c in self.columns:
            if c.name == name:
                c = replace(c, values=tuple(values))
            new.append(c)
        return replace(self, columns=tuple(new))

    def numeric_matrix(self) -> np.ndarray:
        """The (T, K) float matrix; requires all-numeric, fully observed data."""
        bad = [c.name for c in self.columns if c.kind != NUMERIC]
        if bad:
            raise SchemaError("non-numeric columns: " + ", ".join(bad))
        holes = [c.name for c in self.columns if not c.is_complete()]
        if holes:
            raise MissingValuesError("missing cells in: " + ", ".join(holes))
        return np.array([c.values for c in self.columns], dtype=float).T

    def series(self, name: str) -> np.ndarray:
        col = self.column(name)
        if col.kind != NUMERIC:
            raise SchemaError(f"column {name!r} is not numeric")
        if not col.is_complete():
            raise MissingValuesError(f"column {name!r} has missing cells")
        return np.asarray(col.values, dtype=float)


def from_numeric(
    index: Sequence[int],
    names: Sequence[str],
    matrix: np.ndarray,
    index_kind: str = "tick",
    source: str = "",
) -> TimeSeriesTable:
    """Build a fully numeric table from a (T, K) array."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[1] != len(names):
        raise SchemaError("matrix shape does not match the column names")
    cols = tuple(
        Column(name=n, kind=NUMERIC, values=tuple(float(v) for v in matrix[:, j]))
        for j, n in enumerate(names)
    )
    return TimeSeriesTable(
        index=tuple(int(i) for i in index),
        columns=cols,
        index_kind=index_kind,
        source=source,
    )


# -- CSV parsing -----------------------------------------------------------


def _parse_index_cell(text: str) -> tuple[int, str]:
    """Parse one index cell as an integer tick or ISO-8601 timestamp."""
    try:
        return int(text), "tick"
    except ValueError:
        pass
    raw = text.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(raw)
    except ValueError:
        raise SchemaError(f"index cell {text!r} is neither integer nor ISO-8601")
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(round(dt.timestamp() * 1000)), "timestamp"


def _parse_numeric_cell(text: str) -> float | None:
    v = float(text)  # raises ValueError for tokens
    if math.isfinite(v):
        return v
    return None  # NaN / inf sentinels count as missing


def parse_csv(
    text: str,
    delimiter: str = ",",
    index_column: str = DEFAULT_INDEX_COLUMN,
    categorical_overrides: Sequence[str] = (),
    source: str = "",
) -> TimeSeriesTable:
    """Parse a CSV export into a validated table.

    The header row is mandatory and must contain ``index_column``.  Empty
    cells are missing.  A column is categorical iff any non-empty cell fails
    numeric parsing, or its name appears in ``categorical_overrides`` (for
    category ids stored as numbers).  Rows are sorted by index; duplicate
    index values are rejected.
    """
    reader = csv.reader(io.StringIO(text), delimiter=delimiter)
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("empty input: no header row")
    header = [h.strip() for h in header]
    if len(set(header)) != len(header):
        dupes = sorted({h for h in header if header.count(h) > 1})
        raise SchemaError("duplicate column names: " + ", ".join(dupes))
    if index_column not in header:
        raise SchemaError(f"index column {index_column!r} not in header")
    idx_pos = header.index(index_column)
    data_names = [h for i, h in enumerate(header) if i != idx_pos]

    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue  # tolerate blank lines
        if len(row) != len(header):
            raise SchemaError(
                f"row {lineno} has {len(row)} fields, expected {len(header)}"
            )
        rows.append(row)
    if not rows:
        raise SchemaError("table has zero data rows")

    index_pairs = [_parse_index_cell(r[idx_pos]) for r in rows]
    kinds = {k for _, k in index_pairs}
    if len(kinds) > 1:
        raise SchemaError("index mixes integer ticks and timestamps")
    index_kind = kinds.pop()
    index_values = [v for v, _ in index_pairs]

    order = sorted(range(len(rows)), key=lambda i: index_values[i])
    sorted_index = [index_values[i] for i in order]
    for a, b in zip(sorted_index, sorted_index[1:]):
        if a == b:
            raise SchemaError(f"duplicate index value {a}")
    rows = [rows[i] for i in order]

    overrides = set(categorical_overrides)
    unknown = overrides - set(data_names)
    if unknown:
        raise SchemaError(
            "categorical override names not in header: " + ", ".join(sorted(unknown))
        )

    columns = []
    for name in data_names:
        pos = header.index(name)
        raw = [r[pos].strip() for r in rows]
        numeric = name not in overrides
        if numeric:
            for cell in raw:
                if cell == "":
                    continue
                try:
                    float(cell)
                except ValueError:
                    numeric = False
                    break
        if numeric:
            values = tuple(None if c == "" else _parse_numeric_cell(c) for c in raw)
            columns.append(Column(name=name, kind=NUMERIC, values=values))
        else:
            values = tuple(None if c == "" else c for c in raw)
            columns.append(Column(name=name, kind=CATEGORICAL, values=values))

    return TimeSeriesTable(
        index=tuple(sorted_index),
        columns=tuple(columns),
        index_kind=index_kind,
        source=source,
    )


def _format_index_cell(value: int, kind: str) -> str:
    if kind == "tick":
        return str(value)
    secs, ms = divmod(value, 1000)
    dt = datetime.fromtimestamp(secs, tz=timezone.utc)
    return dt.strftime("%Y-%m-%dT%H:%M:%S.") + f"{ms:03d}+00:00"


def write_csv(
    table: TimeSeriesTable,
    delimiter: str = ",",
    index_column: str = DEFAULT_INDEX_COLUMN,
) -> str:
    """Serialize with shortest round-trippable float representation."""
    out = io.StringIO()
    writer = csv.writer(out, delimiter=delimiter, lineterminator="\n")
    writer.writerow([index_column, *table.names])
    for i, idx in enumerate(table.index):
        row = [_format_index_cell(idx, table.index_kind)]
        for col in table.columns:
            v = col.values[i]
            if v is None:
                row.append("")
            elif col.kind == NUMERIC:
                row.append(repr(v))
            else:
                row.append(v)
        writer.writerow(row)
    return out.getvalue()
