import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gapfill.baselines import (
    BaselineMethod,
    Kind,
    impute,
    impute_arima,
    impute_carry,
    impute_constant,
    impute_knn,
    impute_linear,
    impute_spline,
)
from gapfill.errors import InsufficientDataError
from gapfill.series import GapSpec, TimeSeries, find_single_gap, inject_gap


def masked(values):
    return find_single_gap(TimeSeries("x", np.asarray(values, dtype=float)))


def gap_of(series, values, start, size):
    return inject_gap(TimeSeries("x", np.asarray(values, dtype=float)), GapSpec(start, size))


class TestConstant:
    def test_mean(self):
        assert impute_constant(masked([1, np.nan, 3]), "mean").values.tolist() == [1, 2, 3]

    def test_median(self):
        assert impute_constant(masked([1, np.nan, 3, 100]), "median").values[1] == 3

    def test_symmetric_mean_equals_median(self):
        m = masked([1, 2, np.nan, 4, 5])
        assert impute_constant(m, "mean").values[2] == impute_constant(m, "median").values[2] == 3


class TestCarry:
    def test_locf(self):
        assert impute_carry(masked([1, np.nan, np.nan, 4]), "forward").values.tolist() == [1, 1, 1, 4]

    def test_nocb(self):
        assert impute_carry(masked([1, np.nan, np.nan, 4]), "backward").values.tolist() == [1, 4, 4, 4]

    @pytest.mark.parametrize("left,right", [(2.0, 2.0), (2.0, 3.0)])
    def test_single_point_agreement(self, left, right):
        m = masked([left, np.nan, right])
        agree = impute_carry(m, "forward") == impute_carry(m, "backward")
        assert agree == (left == right)


class TestLinear:
    @pytest.mark.parametrize(
        "values,expected",
        [
            ([1, np.nan, np.nan, 4], [1, 2, 3, 4]),
            ([5, np.nan, 5], [5, 5, 5]),
            ([0, np.nan, np.nan, np.nan, np.nan, 10], [0, 2, 4, 6, 8, 10]),
        ],
    )
    def test_examples(self, values, expected):
        assert impute_linear(masked(values)).values == pytest.approx(expected, abs=1e-12)

    @given(st.floats(-100, 100), st.floats(-100, 100), st.integers(1, 20))
    def test_endpoints_bracketed(self, left, right, size):
        vals = impute_linear(masked([left] + [np.nan] * size + [right])).values[1:-1]
        lo, hi = min(left, right), max(left, right)
        assert lo - 1e-9 <= vals[0] <= hi + 1e-9
        assert lo - 1e-9 <= vals[-1] <= hi + 1e-9


class TestSpline:
    def test_reproduces_cubic(self):
        t = np.arange(70, dtype=float)
        y = t**3
        m = gap_of(None, y, 30, 10)
        out = impute_spline(m).values[30:40]
        assert np.abs(out - y[30:40]).max() <= 1e-6 * np.abs(y[30:40]).max()

    def test_collinear_matches_linear(self):
        t = np.arange(30, dtype=float)
        m = gap_of(None, 2.5 * t - 7, 10, 6)
        assert impute_spline(m).values == pytest.approx(impute_linear(m).values, abs=1e-9)

    def test_constant(self):
        assert impute_spline(masked([5, 5, 5, np.nan, 5, 5])).values[3] == pytest.approx(5)

    def test_few_points_falls_back_to_linear(self):
        m = masked([1, np.nan, np.nan, 4])
        assert impute_spline(m).values.tolist() == impute_linear(m).values.tolist()


class TestKnn:
    def test_periodic_same_phase(self):
        pattern = [1.0, 5.0, 2.0, 8.0]
        values = np.array(pattern * 10)
        m = gap_of(None, values, 21, 1)
        assert impute_knn(m).values[21] == values[21]

    def test_constant(self):
        m = gap_of(None, np.full(40, 3.0), 15, 5)
        assert impute_knn(m).values[15:20].tolist() == [3.0] * 5

    def test_planted_match_k1(self):
        rng = np.random.default_rng(7)
        values = rng.normal(size=60)
        values[30:34] = values[10:14]  # context before the gap at 34
        m = gap_of(None, values, 34, 1)
        out = impute_knn(m, BaselineMethod(Kind.KNN, knn_k=1)).values[34]
        assert out == values[14]

    def test_short_left_context_uses_right(self):
        values = np.array([1.0, 5.0, 2.0, 8.0] * 6)
        m = gap_of(None, values, 1, 2)
        assert impute_knn(m).values[1:3].tolist() == [5.0, 2.0]

    def test_no_windows(self):
        m = masked([1.0, 2.0, np.nan, 3.0])
        with pytest.raises(InsufficientDataError):
            impute_knn(m)


class TestArima:
    def test_ar1_recursion(self):
        x = 50.0 * 0.8 ** np.arange(80)
        m = gap_of(None, x, 40, 10)
        out = impute_arima(m).values[40:50]
        expected = x[39] * 0.8 ** np.arange(1, 11)
        assert np.abs(out - expected).max() <= 1e-6 * np.abs(expected).max()

    def test_constant(self):
        m = gap_of(None, np.full(60, 12.0), 30, 8)
        assert impute_arima(m).values[30:38] == pytest.approx([12.0] * 8, abs=1e-9)

    def test_linear_trend_continued(self):
        x = 3.0 + 0.5 * np.arange(80)
        m = gap_of(None, x, 40, 20)
        assert np.abs(impute_arima(m).values[40:60] - x[40:60]).max() <= 1e-6

    def test_prefix_too_short(self):
        m = gap_of(None, np.arange(30.0), 5, 3)
        with pytest.raises(InsufficientDataError):
            impute_arima(m)


@pytest.mark.parametrize("kind", list(Kind))
def test_every_method_keeps_observed_values(kind):
    rng = np.random.default_rng(3)
    x = np.cumsum(rng.normal(size=90)) + 50
    m = gap_of(None, x, 40, 10)
    out = impute(m, kind.value).values
    assert not np.isnan(out).any()
    keep = np.ones(90, bool)
    keep[40:50] = False
    assert np.array_equal(out[keep], x[keep])
    assert np.array_equal(out, impute(m, kind.value).values)
