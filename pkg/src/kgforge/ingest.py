"""Pre-processing: missing-value imputation and categorical encoding.

Both steps are pure table-to-table transforms.  Imputation methods apply to
numeric columns; missing categorical cells are always forward-filled, since
the carry-last-observation rule is the only one of the five that is
meaningful for tokens.  Encoding assigns ordinal codes (or one-hot indicator
columns) by lexicographic token order, so the result does not depend on row
order.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field, replace
from typing import Sequence

from .errors import DegenerateSeriesError, MissingValuesError, SchemaError
from .table import CATEGORICAL, NUMERIC, Column, TimeSeriesTable

IMPUTATION_METHODS = (
    "mean",
    "median",
    "forward_fill",
    "linear_interpolation",
    "drop_rows",
)
ENCODING_METHODS = ("ordinal", "one_hot")


@dataclass(frozen=True)
class PreprocessConfig:
    imputation: str = "mean"
    encoding: str = "ordinal"
    selected_columns: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.imputation not in IMPUTATION_METHODS:
            raise SchemaError(
                f"imputation must be one of {IMPUTATION_METHODS}, "
                f"got {self.imputation!r}"
            )
        if self.encoding not in ENCODING_METHODS:
            raise SchemaError(
                f"encoding must be one of {ENCODING_METHODS}, got {self.encoding!r}"
            )


@dataclass(frozen=True)
class EncodingMap:
    """Records how categorical columns were turned numeric.

    ``ordinal`` maps column name -> {token -> code}; ``one_hot`` maps column
    name -> generated indicator column names.  Codes follow the lexicographic
    order of the distinct tokens, so the map is deterministic.
    """

    ordinal: dict[str, dict[str, int]] = field(default_factory=dict)
    one_hot: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def is_empty(self) -> bool:
        return not self.ordinal and not self.one_hot

    def to_json_dict(self) -> dict:
        return {
            "ordinal": {k: dict(v) for k, v in sorted(self.ordinal.items())},
            "one_hot": {k: list(v) for k, v in sorted(self.one_hot.items())},
        }


@dataclass(frozen=True)
class PreprocessReport:
    imputed_cells: dict[str, int]
    dropped_rows: int
    encoding_map: EncodingMap

    def to_json_dict(self) -> dict:
        return {
            "imputed_cells": dict(sorted(self.imputed_cells.items())),
            "dropped_rows": self.dropped_rows,
            "encoding_map": self.encoding_map.to_json_dict(),
        }


def _forward_fill(values: tuple) -> tuple:
    observed = [v for v in values if v is not None]
    if not observed:
        raise DegenerateSeriesError("column is entirely missing")
    out, last = [], observed[0]  # leading missings take the first observation
    for v in values:
        if v is not None:
            last = v
        out.append(last)
    return tuple(out)


def _interpolate(values: tuple) -> tuple:
    known = [(i, v) for i, v in enumerate(values) if v is not None]
    if not known:
        raise DegenerateSeriesError("column is entirely missing")
    out = list(values)
    first_i, first_v = known[0]
    last_i, last_v = known[-1]
    for i in range(first_i):
        out[i] = first_v
    for i in range(last_i + 1, len(values)):
        out[i] = last_v
    for (i0, v0), (i1, v1) in zip(known, known[1:]):
        for i in range(i0 + 1, i1):
            frac = (i - i0) / (i1 - i0)
            out[i] = v0 + frac * (v1 - v0)
    return tuple(out)


def impute(table: TimeSeriesTable, method: str) -> TimeSeriesTable:
    """Fill every missing cell; never alters an observed cell.

    ``mean``/``median``/``linear_interpolation`` apply per numeric column;
    categorical columns are forward-filled under any method.  ``drop_rows``
    removes rows containing any missing cell instead of filling.
    """
    if method not in IMPUTATION_METHODS:
        raise SchemaError(f"unknown imputation method {method!r}")

    if method == "drop_rows":
        keep = [
            i
            for i in range(table.t)
            if all(c.values[i] is not None for c in table.columns)
        ]
        if not keep:
            raise DegenerateSeriesError("drop_rows removed every row")
        cols = tuple(
            replace(c, values=tuple(c.values[i] for i in keep)) for c in table.columns
        )
        return replace(
            table, index=tuple(table.index[i] for i in keep), columns=cols
        )

    new_columns = []
    for col in table.columns:
        if col.is_complete():
            new_columns.append(col)
            continue
        if col.kind == CATEGORICAL:
            new_columns.append(replace(col, values=_forward_fill(col.values)))
            continue
        observed = [v for v in col.values if v is not None]
        if not observed:
            raise DegenerateSeriesError(f"column {col.name!r} is entirely missing")
        if method == "mean":
            fill = sum(observed) / len(observed)
            values = tuple(fill if v is None else v for v in col.values)
        elif method == "median":
            fill = float(statistics.median(observed))
            values = tuple(fill if v is None else v for v in col.values)
        elif method == "forward_fill":
            values = _forward_fill(col.values)
        else:  # linear_interpolation
            values = _interpolate(col.values)
        new_columns.append(replace(col, values=values))
    return replace(table, columns=tuple(new_columns))


def encode_categorical(
    table: TimeSeriesTable, method: str
) -> tuple[TimeSeriesTable, EncodingMap]:
    """Convert categorical columns to numeric ones.

    ``ordinal`` replaces tokens by lexicographic codes starting at 0;
    ``one_hot`` replaces the column in place by one 0/1 indicator column per
    distinct token, named ``<col>=<token>``.
    """
    if method not in ENCODING_METHODS:
        raise SchemaError(f"unknown encoding method {method!r}")
    if table.has_missing():
        raise MissingValuesError("encode_categorical requires a complete table")

    ordinal: dict[str, dict[str, int]] = {}
    one_hot: dict[str, tuple[str, ...]] = {}
    new_columns: list[Column] = []
    existing = set(table.names)

    for col in table.columns:
        if col.kind == NUMERIC:
            new_columns.append(col)
            continue
        tokens = sorted(set(col.values))
        if method == "ordinal":
            codes = {tok: i for i, tok in enumerate(tokens)}
            ordinal[col.name] = codes
            values = tuple(float(codes[v]) for v in col.values)
            new_columns.append(Column(name=col.name, kind=NUMERIC, values=values))
        else:
            generated = []
            for tok in tokens:
                gen = f"{col.name}={tok}"
                if gen in existing:
                    raise SchemaError(
                        f"one_hot indicator {gen!r} collides with an existing column"
                    )
                existing.add(gen)
                generated.append(gen)
                values = tuple(1.0 if v == tok else 0.0 for v in col.values)
                new_columns.append(Column(name=gen, kind=NUMERIC, values=values))
            one_hot[col.name] = tuple(generated)

    return (
        replace(table, columns=tuple(new_columns)),
        EncodingMap(ordinal=ordinal, one_hot=one_hot),
    )


def preprocess(
    table: TimeSeriesTable, config: PreprocessConfig
) -> tuple[TimeSeriesTable, PreprocessReport]:
    """Column selection, then imputation, then encoding, with a report."""
    if config.selected_columns is not None:
        missing = set(config.selected_columns) - set(table.names)
        if missing:
            raise SchemaError(
                "selected columns not in table: " + ", ".join(sorted(missing))
            )
        table = table.select(config.selected_columns)
    before = table.missing_counts()
    rows_before = table.t
    filled = impute(table, config.imputation)
    if config.imputation == "drop_rows":
        imputed = {name: 0 for name in table.names}
        dropped = rows_before - filled.t
    else:
        imputed = before
        dropped = 0
    encoded, mapping = encode_categorical(filled, config.encoding)
    return encoded, PreprocessReport(
        imputed_cells=imputed, dropped_rows=dropped, encoding_map=mapping
    )
