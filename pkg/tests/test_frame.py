"""Ingestion, alignment, variable construction, transforms and statistics."""

from __future__ import annotations

import json
import warnings
from datetime import date

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from chainardl.errors import AlignmentError, ConstructionError, ParseError, SchemaError
from chainardl.frame import (STANDARD_RECIPES, Frame, align_daily, complement_share, construct_variables,
                             descriptive_stats, diff, display_name, format_stats, from_day, lag,
                             load_csv, parse_date, stats_records, to_day, write_csv)

from conftest import write_csv as put


def _frame(start: str, values: dict) -> Frame:
    n = len(next(iter(values.values())))
    d0 = to_day(start)
    return Frame(np.arange(d0, d0 + n), {k: np.asarray(v, float) for k, v in values.items()})


class TestLoadCsv:
    def test_two_rows(self, tmp_path):
        p = put(tmp_path / "a.csv", "date,btc_price\n2019-12-04,7252.0\n2019-12-05,7448.0\n")
        f = load_csv(p)
        assert len(f) == 2
        assert f.names == ["btc_price"]
        np.testing.assert_array_equal(f["btc_price"], [7252.0, 7448.0])
        assert f.meta["btc_price"] == "a.csv:btc_price"

    def test_empty_cell_is_missing(self, tmp_path):
        p = put(tmp_path / "a.csv", "date,x,y\n2020-01-01,1,2\n2020-01-02,,3\n")
        f = load_csv(p)
        assert np.isnan(f["x"][1])
        assert f["y"][1] == 3.0

    def test_out_of_order_rows_are_sorted(self, tmp_path):
        a = load_csv(put(tmp_path / "a.csv", "date,x\n2020-01-02,2\n2020-01-01,1\n"))
        b = load_csv(put(tmp_path / "b.csv", "date,x\n2020-01-01,1\n2020-01-02,2\n"))
        np.testing.assert_array_equal(a.dates, b.dates)
        np.testing.assert_array_equal(a["x"], b["x"])

    def test_dotted_dates(self, tmp_path):
        f = load_csv(put(tmp_path / "c.csv", "date,CPIAUCSL\n01.01.2020,255.868\n"))
        assert from_day(f.dates[0]) == date(2020, 1, 1)

    def test_duplicate_date(self, tmp_path):
        p = put(tmp_path / "a.csv", "date,x\n2020-01-01,1\n2020-01-01,2\n")
        with pytest.raises(SchemaError, match="duplicate date"):
            load_csv(p)

    def test_bad_number_location(self, tmp_path):
        p = put(tmp_path / "a.csv", "date,x\n2020-01-01,1\n2020-01-02,abc\n")
        with pytest.raises(ParseError) as err:
            load_csv(p)
        assert err.value.line == 3 and err.value.column == "x"

    def test_bad_date(self, tmp_path):
        p = put(tmp_path / "a.csv", "date,x\n2020-13-01,1\n")
        with pytest.raises(ParseError):
            load_csv(p)

    def test_schema_renames_and_ignores(self, tmp_path):
        p = put(tmp_path / "m.csv", "date,DFF,JUNK\n2020-01-01,1.55,9\n")
        f = load_csv(p, {"DFF": "dff", "JUNK": "ignore"})
        assert f.names == ["dff"]

    def test_schema_missing_header(self, tmp_path):
        p = put(tmp_path / "m.csv", "date,DFF\n2020-01-01,1.55\n")
        with pytest.raises(SchemaError):
            load_csv(p, {"GOLD": "gold_price"})

    def test_round_trip(self, tmp_path):
        src = put(tmp_path / "a.csv", "date,x,y\n2020-01-01,1.5,\n2020-01-02,-2.25,3\n")
        f = load_csv(src)
        write_csv(f, tmp_path / "b.csv")
        g = load_csv(tmp_path / "b.csv")
        np.testing.assert_array_equal(f.dates, g.dates)
        for c in f.names:
            np.testing.assert_array_equal(f[c], g[c])


class TestAlign:
    def test_monthly_cpi_forward_filled(self):
        cpi = Frame(np.array([to_day("2020-01-01"), to_day("2020-02-01")]), {"cpi": np.array([255.868, 256.0])})
        out = align_daily([cpi], "2020-01-01", "2020-01-31")
        assert len(out) == 31
        assert np.all(out["cpi"] == 255.868)

    def test_weekend_takes_friday(self):
        # 2020-01-03 is a Friday
        days = np.array([to_day(d) for d in ("2020-01-02", "2020-01-03", "2020-01-06", "2020-01-07", "2020-01-08")])
        idx = Frame(days, {"w": np.array([1.0, 2.0, 3.0, 4.0, 5.0])})
        out = align_daily([idx], "2020-01-02", "2020-01-08")
        np.testing.assert_array_equal(out["w"], [1, 2, 2, 2, 3, 4, 5])

    def test_strict_leaves_gaps(self):
        days = np.array([to_day("2020-01-01"), to_day("2020-01-03")])
        out = align_daily([Frame(days, {"w": np.array([1.0, 3.0])})], "2020-01-01", "2020-01-03", "strict")
        assert np.isnan(out["w"][1])

    def test_leading_missing_stays_missing(self):
        f = Frame(np.array([to_day("2020-01-03")]), {"w": np.array([1.0])})
        out = align_daily([f], "2020-01-01", "2020-01-04")
        assert np.isnan(out["w"][:2]).all() and (out["w"][2:] == 1.0).all()

    def test_daily_identity(self):
        f = _frame("2020-01-01", {"x": [1.0, 2.0, 3.0]})
        for pol in ("forward-fill", "strict"):
            out = align_daily([f], "2020-01-01", "2020-01-03", pol)
            np.testing.assert_array_equal(out["x"], f["x"])

    def test_all_missing_column(self):
        f = Frame(np.array([to_day("2021-01-01")]), {"x": np.array([1.0])})
        with pytest.raises(AlignmentError, match="'x'"):
            align_daily([f], "2020-01-01", "2020-01-05")

    @given(st.integers(0, 400), st.integers(1, 30))
    @settings(max_examples=30, deadline=None)
    def test_row_count_is_calendar_span(self, span, nobs):
        d0 = to_day("2020-01-01")
        f = Frame(d0 + np.arange(nobs) * 3, {"x": np.arange(nobs, dtype=float)})
        out = align_daily([f], from_day(d0), from_day(d0 + span))
        assert len(out) == span + 1
        assert np.all(np.diff(out.dates) == 1)


class TestConstruct:
    def _raw(self, dates, **cols):
        d = np.array([to_day(x) for x in dates])
        n = d.size
        base = {c: np.zeros(n) for c in ("bank_inflow_top10", "bank_outflow_top10", "exchange_inflow_top10",
                                          "exchange_outflow_top10", "tokens_transferred_total", "fund_flow_ratio")}
        base.update({k: np.asarray(v, float) for k, v in cols.items()})
        return Frame(d, base)

    def test_symmetric_whale_flows(self):
        raw = self._raw(["2020-01-01"], bank_inflow_top10=[500], bank_outflow_top10=[500])
        out = construct_variables(raw)
        assert out["bank_whale_netflow"][0] == 0.0

    def test_whale_netflow_arithmetic(self):
        raw = self._raw(["2020-01-01", "2020-01-02"], exchange_inflow_top10=[1200.5, 80.0],
                        exchange_outflow_top10=[200.25, 100.0])
        out = construct_variables(raw)
        np.testing.assert_array_equal(out["exchange_whale_netflow"], [1000.25, -20.0])

    def test_on_chain_transactions(self):
        raw = self._raw(["2020-01-01"], tokens_transferred_total=[300000], fund_flow_ratio=[10])
        assert construct_variables(raw)["on_chain_btc_transactions"][0] == pytest.approx(270000.0, abs=1e-9)

    def test_ratio_out_of_range_warns_not_clamped(self):
        raw = self._raw(["2020-01-01"], tokens_transferred_total=[1000], fund_flow_ratio=[120])
        with pytest.warns(RuntimeWarning):
            out = construct_variables(raw)
        assert out["on_chain_btc_transactions"][0] == pytest.approx(-200.0)

    def test_missing_input_cell_propagates(self):
        raw = self._raw(["2020-01-01", "2020-01-02"], bank_inflow_top10=[1, np.nan])
        assert np.isnan(construct_variables(raw)["bank_whale_netflow"][1])

    def test_dummy_switch_dates(self):
        dates = ["2020-11-19", "2020-11-20", "2022-11-07", "2022-11-08"]
        out = construct_variables(self._raw(dates))
        np.testing.assert_array_equal(out["dummy1"], [0, 1, 1, 1])
        np.testing.assert_array_equal(out["dummy2"], [0, 0, 0, 1])
        np.testing.assert_array_equal(out["dummy3"], [0, 1, 1, 0])

    def test_trend_and_timedummies(self):
        dates = [from_day(to_day("2020-11-18") + i).isoformat() for i in range(5)]
        out = construct_variables(self._raw(dates))
        np.testing.assert_array_equal(out["trend"], [0, 1, 2, 3, 4])
        np.testing.assert_array_equal(out["timedummy1"], [0, 0, 2, 3, 4])

    def test_absent_input(self):
        raw = Frame(np.array([0]), {"bank_inflow_top10": np.array([1.0])})
        with pytest.raises(ConstructionError, match="bank_outflow_top10"):
            construct_variables(raw)

    def test_idempotent(self):
        dates = [from_day(to_day("2020-11-01") + i).isoformat() for i in range(40)]
        once = construct_variables(self._raw(dates, bank_inflow_top10=np.arange(40.0)))
        twice = construct_variables(once)
        for c in once.names:
            np.testing.assert_array_equal(once[c], twice[c])

    def test_dummy_consistency_identity(self):
        d0 = to_day("2019-12-04")
        dates = [from_day(d0 + i).isoformat() for i in range(1514)]
        out = construct_variables(self._raw(dates))
        before = out.dates < to_day("2022-11-08")
        np.testing.assert_array_equal(out["dummy3"][before], out["dummy1"][before])
        assert np.all(out["dummy3"][~before] == 0) and np.all(out["dummy2"][~before] == 1)

    @given(arrays(float, 5, elements=st.floats(0, 1e7)), arrays(float, 5, elements=st.floats(0, 100)))
    @settings(max_examples=50, deadline=None)
    def test_on_chain_nonnegative(self, tokens, ratio):
        r = complement_share("v", "t", "r")
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            out = r.compute(tokens, ratio, np.arange(5))
        assert np.all(out >= 0)


class TestTransforms:
    def test_lag(self):
        out = lag([1, 2, 3], 1)
        assert np.isnan(out[0]) and list(out[1:]) == [1, 2]

    def test_diff(self):
        out = diff([5, 9, 4], 1)
        assert np.isnan(out[0]) and list(out[1:]) == [4, -5]

    def test_diff_constant(self):
        assert np.all(diff(np.full(6, 3.3))[1:] == 0)

    def test_bad_orders(self):
        with pytest.raises(ValueError):
            lag([1, 2], 2)
        with pytest.raises(ValueError):
            diff([1, 2], 2)

    @given(arrays(float, st.integers(4, 40), elements=st.floats(-1e6, 1e6)), st.integers(0, 3), st.integers(1, 3))
    @settings(max_examples=60, deadline=None)
    def test_diff_lag_commute(self, x, a, k):
        if a + k >= x.size:
            return
        left, right = diff(lag(x, a), k), lag(diff(x, k), a)
        ok = ~np.isnan(left) & ~np.isnan(right)
        np.testing.assert_array_equal(left[ok], right[ok])


class TestStats:
    def test_hand_values(self):
        f = _frame("2020-01-01", {"x": [1, 2, 3, 4]})
        (r,) = descriptive_stats(f)
        assert r.n == 4 and r.mean == 2.5
        assert r.sd == pytest.approx(1.2909944, abs=1e-7)

    def test_min_max(self):
        (r,) = descriptive_stats(_frame("2020-01-01", {"btc_price": [5005.0, 67547.0]}))
        assert (r.min, r.max) == (5005.0, 67547.0)

    def test_constant_sd_zero(self):
        (r,) = descriptive_stats(_frame("2020-01-01", {"x": [2.0] * 5}))
        assert r.sd == 0.0

    def test_all_missing(self):
        (r,) = descriptive_stats(_frame("2020-01-01", {"x": [np.nan, np.nan]}))
        assert r.n == 0 and np.isnan(r.mean)
        assert json.dumps(stats_records([r]))

    def test_rendering(self):
        f = _frame("2020-01-01", {"btc_price": [1.0, 2.0], "total_supply": [1.8e7, 1.9e7]})
        text = format_stats(descriptive_stats(f))
        assert "BTC price" in text and "1.500" in text
        assert "1.85E+07" in text

    def test_display_names(self):
        assert display_name("dfii10") == "DFII10"
        assert display_name("on_chain_btc_transactions") == "On chain BTC transactions"


def test_parse_date_formats():
    assert parse_date("2019-12-04") == parse_date("04.12.2019") == date(2019, 12, 4)


def test_frame_is_immutable():
    f = _frame("2020-01-01", {"x": [1.0, 2.0]})
    with pytest.raises(ValueError):
        f["x"][0] = 5.0


def test_recipes_declare_inputs():
    names = {r.name for r in STANDARD_RECIPES}
    assert {"bank_whale_netflow", "exchange_whale_netflow", "on_chain_btc_transactions",
            "dummy1", "dummy2", "dummy3", "trend"} <= names
