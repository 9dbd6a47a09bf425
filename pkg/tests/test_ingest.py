"""Imputation, categorical encoding, and the preprocess pipeline."""

import pytest
from hypothesis import given, strategies as st

from kgforge import (
    Column,
    DegenerateSeriesError,
    EncodingMap,
    MissingValuesError,
    PreprocessConfig,
    SchemaError,
    TimeSeriesTable,
    encode_categorical,
    impute,
    parse_csv,
    preprocess,
)


def table_of(**cols):
    """One-liner table builder; values tuples may contain None."""
    t = len(next(iter(cols.values())))
    built = tuple(
        Column(
            name=n,
            kind="categorical" if any(isinstance(v, str) for v in vs) else "numeric",
            values=tuple(vs),
        )
        for n, vs in cols.items()
    )
    return TimeSeriesTable(index=tuple(range(t)), columns=built)


class TestImpute:
    def test_mean(self):
        out = impute(table_of(a=[1.0, None, 3.0]), "mean")
        assert out.column("a").values == (1.0, 2.0, 3.0)

    def test_linear_interpolation_midpoint(self):
        out = impute(table_of(a=[1.0, None, 4.0]), "linear_interpolation")
        assert out.column("a").values == (1.0, 2.5, 4.0)

    def test_linear_interpolation_boundaries(self):
        out = impute(table_of(a=[None, 2.0, None]), "linear_interpolation")
        assert out.column("a").values == (2.0, 2.0, 2.0)

    def test_median(self):
        out = impute(table_of(a=[1.0, 2.0, None, 9.0, None]), "median")
        assert out.column("a").values == (1.0, 2.0, 2.0, 9.0, 2.0)

    def test_forward_fill(self):
        out = impute(table_of(a=[1.0, None, None, 4.0]), "forward_fill")
        assert out.column("a").values == (1.0, 1.0, 1.0, 4.0)

    def test_forward_fill_leading_hole(self):
        out = impute(table_of(a=[None, 5.0, None]), "forward_fill")
        assert out.column("a").values == (5.0, 5.0, 5.0)

    def test_drop_rows(self):
        out = impute(table_of(a=[1.0, None, 3.0], b=[4.0, 5.0, 6.0]), "drop_rows")
        assert out.t == 2
        assert out.index == (0, 2)
        assert out.column("b").values == (4.0, 6.0)

    def test_drop_rows_empties_table(self):
        with pytest.raises(DegenerateSeriesError):
            impute(table_of(a=[None, None]), "drop_rows")

    def test_all_missing_column(self):
        with pytest.raises(DegenerateSeriesError, match="entirely missing"):
            impute(table_of(a=[None, None, None]), "mean")

    def test_categorical_forward_filled_under_any_method(self):
        # numeric strategies do not apply to tokens
        out = impute(table_of(c=["x", None, "y"]), "median")
        assert out.column("c").values == ("x", "x", "y")

    def test_unknown_method(self):
        with pytest.raises(SchemaError):
            impute(table_of(a=[1.0]), "hotdeck")


observed = st.floats(allow_nan=False, allow_infinity=False, min_value=-1e6, max_value=1e6)
cells = st.one_of(st.none(), observed)


@st.composite
def holey_tables(draw):
    t = draw(st.integers(min_value=2, max_value=8))
    k = draw(st.integers(min_value=1, max_value=3))
    cols = {}
    for j in range(k):
        vals = draw(st.lists(cells, min_size=t, max_size=t))
        if all(v is None for v in vals):
            vals[draw(st.integers(min_value=0, max_value=t - 1))] = draw(observed)
        cols[f"c{j}"] = vals
    return table_of(**cols)


fill_methods = st.sampled_from(["mean", "median", "forward_fill", "linear_interpolation"])


class TestImputeProperties:
    @given(holey_tables(), fill_methods)
    def test_idempotent(self, table, method):
        once = impute(table, method)
        assert impute(once, method) == once

    @given(holey_tables(), fill_methods)
    def test_complete_and_preserving(self, table, method):
        out = impute(table, method)
        assert not out.has_missing()
        for col in table.columns:
            after = out.column(col.name).values
            for i, v in enumerate(col.values):
                if v is not None:
                    assert after[i] == v


class TestEncode:
    def test_ordinal_codes_lexicographic(self):
        table = table_of(c=["red", "blue", "red"])
        out, emap = encode_categorical(table, "ordinal")
        assert out.column("c").values == (1.0, 0.0, 1.0)
        assert emap.ordinal == {"c": {"blue": 0, "red": 1}}

    def test_one_hot_indicators(self):
        table = table_of(c=["red", "blue", "red"])
        out, emap = encode_categorical(table, "one_hot")
        assert out.names == ("c=blue", "c=red")
        assert out.column("c=blue").values == (0.0, 1.0, 0.0)
        assert out.column("c=red").values == (1.0, 0.0, 1.0)
        assert emap.one_hot == {"c": ("c=blue", "c=red")}

    def test_numeric_table_is_identity(self):
        table = table_of(a=[1.0, 2.0])
        out, emap = encode_categorical(table, "ordinal")
        assert out == table
        assert emap.is_empty()

    def test_one_hot_collision(self):
        table = table_of(**{"c": ["x", "y"], "c=x": [1.0, 2.0]})
        with pytest.raises(SchemaError, match="collides"):
            encode_categorical(table, "one_hot")

    def test_requires_complete_table(self):
        with pytest.raises(MissingValuesError):
            encode_categorical(table_of(c=["x", None]), "ordinal")

    def test_ordinal_preserves_column_count(self):
        table = table_of(a=[1.0, 2.0], c=["x", "y"], d=["p", "p"])
        out, _ = encode_categorical(table, "ordinal")
        assert len(out.names) == 3

    def test_one_hot_column_count(self):
        # numeric columns + sum of distinct tokens per categorical column
        table = table_of(a=[1.0, 2.0, 3.0], c=["x", "y", "x"], d=["p", "p", "q"])
        out, _ = encode_categorical(table, "one_hot")
        assert len(out.names) == 1 + 2 + 2
        assert out.is_numeric()


class TestPreprocess:
    def test_pipeline_report(self):
        table = parse_csv("timestamp,a,b\n1,1.0,x\n2,,y\n3,3.0,x\n")
        out, report = preprocess(table, PreprocessConfig())
        assert out.is_numeric()
        assert not out.has_missing()
        assert report.imputed_cells == {"a": 1, "b": 0}
        assert report.dropped_rows == 0
        assert report.encoding_map.ordinal == {"b": {"x": 0, "y": 1}}

    def test_column_selection(self):
        table = table_of(a=[1.0, 2.0], b=[3.0, 4.0])
        out, _ = preprocess(table, PreprocessConfig(selected_columns=("b",)))
        assert out.names == ("b",)

    def test_unknown_selection(self):
        with pytest.raises(SchemaError, match="selected columns"):
            preprocess(table_of(a=[1.0]), PreprocessConfig(selected_columns=("z",)))

    def test_drop_rows_reported(self):
        table = table_of(a=[1.0, None, 3.0])
        out, report = preprocess(table, PreprocessConfig(imputation="drop_rows"))
        assert out.t == 2
        assert report.dropped_rows == 1
        assert report.imputed_cells == {"a": 0}

    def test_config_validation(self):
        with pytest.raises(SchemaError):
            PreprocessConfig(imputation="magic")
        with pytest.raises(SchemaError):
            PreprocessConfig(encoding="binary")

    def test_report_json_shape(self):
        _, report = preprocess(
            table_of(a=[1.0, None], c=["x", "y"]), PreprocessConfig()
        )
        d = report.to_json_dict()
        assert d["imputed_cells"] == {"a": 1, "c": 0}
        assert d["encoding_map"]["ordinal"] == {"c": {"x": 0, "y": 1}}
        assert isinstance(EncodingMap().to_json_dict(), dict)
