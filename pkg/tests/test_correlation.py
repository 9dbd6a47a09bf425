"""Pairwise relation scores and the correlation matrix."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kgforge import (
    DegenerateSeriesError,
    SchemaError,
    SeriesTooShortError,
    correlation_matrix,
    euclidean_similarity,
    from_numeric,
    normality_summary,
    pearson,
    spearman,
)
from .oracles import euclidean_textbook, pearson_textbook, spearman_textbook


class TestPearson:
    def test_identity(self):
        assert pearson([1, 2, 3], [1, 2, 3]) == 1.0

    def test_negation(self):
        assert pearson([1, 2, 3], [3, 2, 1]) == -1.0

    def test_known_value(self):
        # oracle: raw-moment formula at 50 decimal digits, see tests/oracles.py
        assert pearson([1, 2, 3], [1, 2, 4]) == pytest.approx(
            0.98198050606196572, abs=1e-15
        )

    def test_zero_variance_raises(self):
        with pytest.raises(DegenerateSeriesError):
            pearson([1, 1, 1], [1, 2, 3])

    def test_length_mismatch(self):
        with pytest.raises(SchemaError):
            pearson([1, 2, 3], [1, 2])

    def test_too_short(self):
        with pytest.raises(SeriesTooShortError):
            pearson([1, 2], [3, 4])

    def test_non_finite_rejected(self):
        with pytest.raises(SchemaError):
            pearson([1, 2, float("nan")], [1, 2, 3])


class TestSpearman:
    def test_monotone_transform(self):
        x = [1.0, 2.0, 3.0, 4.0]
        assert spearman(x, [v**3 for v in x]) == 1.0

    def test_strictly_decreasing(self):
        assert spearman([1, 2, 3], [9, 4, 1]) == -1.0

    def test_tied_ranks(self):
        # ranks of x are (1, 2.5, 2.5, 4); oracle in tests/oracles.py
        assert spearman([1, 2, 2, 3], [1, 2, 3, 4]) == pytest.approx(
            0.9486832980505138, abs=1e-15
        )

    def test_all_equal_raises(self):
        with pytest.raises(DegenerateSeriesError):
            spearman([5, 5, 5], [1, 2, 3])


class TestEuclidean:
    def test_identical_series(self):
        assert euclidean_similarity([1.0, 7.0, 2.0], [1.0, 7.0, 2.0]) == 1.0

    def test_two_constants(self):
        # both z-score to zeros, distance 0
        assert euclidean_similarity([0, 0, 0], [5, 5, 5]) == 1.0

    def test_exact_negation(self):
        # normalized negation: d^2 = 4T, so the score is exactly 1/3
        assert euclidean_similarity([1, 2, 3], [3, 2, 1]) == pytest.approx(
            1.0 / 3.0, abs=1e-15
        )


# integer-valued series keep the raw-moment oracle sums exact; bounded
# floats with a spread floor keep the invariance checks away from the
# regime where a series is constant up to rounding
def _spread_ok(xs):
    return float(np.std(xs)) > 0.01


@st.composite
def varied_pairs(draw, elements=None):
    if elements is None:
        elements = st.floats(
            allow_nan=False, allow_infinity=False, min_value=-1e3, max_value=1e3
        )
    x = draw(st.lists(elements, min_size=3, max_size=12).filter(_spread_ok))
    y = draw(
        st.lists(elements, min_size=len(x), max_size=len(x)).filter(_spread_ok)
    )
    return [float(v) for v in x], [float(v) for v in y]


int_pairs = varied_pairs(elements=st.integers(min_value=-1000, max_value=1000))


class TestScalarProperties:
    @given(int_pairs)
    def test_pearson_matches_textbook(self, pair):
        x, y = pair
        assert pearson(x, y) == pytest.approx(pearson_textbook(x, y), abs=1e-11)

    @given(int_pairs)
    def test_spearman_matches_textbook(self, pair):
        x, y = pair
        assert spearman(x, y) == pytest.approx(spearman_textbook(x, y), abs=1e-11)

    @given(int_pairs)
    def test_euclidean_matches_textbook(self, pair):
        x, y = pair
        assert euclidean_similarity(x, y) == pytest.approx(
            euclidean_textbook(x, y), abs=1e-11
        )

    @given(varied_pairs())
    def test_symmetry_and_bounds(self, pair):
        x, y = pair
        for fn in (pearson, spearman, euclidean_similarity):
            a, b = fn(x, y), fn(y, x)
            assert a == pytest.approx(b, abs=1e-12)
        assert -1.0 <= pearson(x, y) <= 1.0
        assert -1.0 <= spearman(x, y) <= 1.0
        assert 0.0 < euclidean_similarity(x, y) <= 1.0

    @given(varied_pairs(), st.floats(min_value=0.1, max_value=10), st.floats(min_value=-10, max_value=10))
    def test_pearson_affine_invariance(self, pair, scale, shift):
        x, y = pair
        rescaled = [scale * v + shift for v in x]
        assert pearson(rescaled, y) == pytest.approx(pearson(x, y), abs=1e-7)

    @given(varied_pairs(), st.floats(min_value=0.1, max_value=10), st.floats(min_value=-10, max_value=10))
    def test_euclidean_affine_invariance(self, pair, scale, shift):
        # z-scoring removes location and positive scale
        x, y = pair
        rescaled = [scale * v + shift for v in x]
        assert euclidean_similarity(rescaled, y) == pytest.approx(
            euclidean_similarity(x, y), abs=1e-7
        )


class TestMatrix:
    def test_identical_columns(self):
        table = from_numeric(range(3), ["a", "b"], np.array([[1, 1], [2, 2], [3, 3]], float))
        m = correlation_matrix(table, "pearson")
        assert m.scores == ((1.0, 1.0), (1.0, 1.0))

    def test_constant_column_flagged(self):
        table = from_numeric(
            range(4), ["a", "k"], np.column_stack([[1, 2, 3, 4], [7, 7, 7, 7]]).astype(float)
        )
        m = correlation_matrix(table, "pearson")
        assert m.degenerate == {"k"}
        assert m.score("a", "k") == 0.0
        assert m.score("k", "k") == 1.0
        assert m.is_flagged("a", "k")
        assert not m.is_flagged("a", "a")

    def test_matrix_equals_pairwise_calls(self, rng):
        data = rng.standard_normal((30, 3))
        table = from_numeric(range(30), ["a", "b", "c"], data)
        for method, fn in [
            ("pearson", pearson),
            ("spearman", spearman),
            ("euclidean", euclidean_similarity),
        ]:
            m = correlation_matrix(table, method)
            for i in range(3):
                for j in range(3):
                    expect = 1.0 if i == j else fn(data[:, i], data[:, j])
                    assert m.scores[i][j] == pytest.approx(expect, abs=1e-12)

    def test_symmetry_invariant(self, rng):
        data = rng.standard_normal((25, 4))
        m = correlation_matrix(from_numeric(range(25), list("abcd"), data), "spearman")
        arr = np.array(m.scores)
        assert np.array_equal(arr, arr.T)
        assert np.array_equal(np.diag(arr), np.ones(4))

    def test_single_column_rejected(self):
        table = from_numeric(range(3), ["a"], np.arange(3.0)[:, None])
        with pytest.raises(SchemaError, match="at least 2"):
            correlation_matrix(table, "pearson")

    def test_unknown_method(self):
        table = from_numeric(range(3), ["a", "b"], np.zeros((3, 2)))
        with pytest.raises(SchemaError, match="method"):
            correlation_matrix(table, "cosine")

    def test_json_round_trip_shape(self, rng):
        data = rng.standard_normal((10, 2))
        m = correlation_matrix(from_numeric(range(10), ["a", "b"], data), "euclidean")
        d = m.to_json_dict()
        assert d["method"] == "euclidean"
        assert d["names"] == ["a", "b"]
        assert isinstance(m.to_json(), str)


class TestNormalitySummary:
    def test_histogram_totals(self, rng):
        x = rng.standard_normal(500)
        s = normality_summary(x, bins=10)
        assert sum(s.counts) == 500
        assert len(s.bin_edges) == 11
        assert s.bin_edges[0] == pytest.approx(float(x.min()))
        assert s.bin_edges[-1] == pytest.approx(float(x.max()))

    def test_gaussian_moments(self, rng):
        x = rng.standard_normal(20000)
        s = normality_summary(x)
        assert abs(s.skewness) < 0.1
        assert abs(s.excess_kurtosis) < 0.2

    def test_skewed_sample(self, rng):
        x = rng.exponential(size=20000)
        s = normality_summary(x)
        assert s.skewness > 1.0  # exponential has skewness 2
        assert s.excess_kurtosis > 2.0

    def test_short_input(self):
        with pytest.raises(SeriesTooShortError):
            normality_summary([1.0] * 7)

    def test_degenerate_range(self):
        with pytest.raises(DegenerateSeriesError):
            normality_summary([3.0] * 50)
