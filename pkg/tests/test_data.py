import math
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zetacast import fixtures
from zetacast.data import (
    CsvParseError,
    CsvSchema,
    DuplicatePeriodError,
    MacroRecord,
    MacroSeries,
    ShockAnnotation,
    ValidationError,
    index_map,
    ingest_csv,
    load_table,
    t_transform,
    write_csv,
)


def _series(*rows, beta=0.1):
    return MacroSeries(tuple(MacroRecord(str(i + 1), *r) for i, r in enumerate(rows)), beta=beta)


def test_ingest_macro_fixture():
    series = ingest_csv(fixtures.path("macro_example.csv"))
    assert len(series) == 10
    assert series.periods == [str(y) for y in range(2015, 2025)]
    assert series.records[0].reer is None
    assert series.records[-1].inflation_actual == 1.1


def test_table1_fixture_has_ten_periods():
    table = load_table(fixtures.path("table1.csv"))
    assert list(table.index) == list(range(1, 11))
    assert table["zeta"][0] == 0.65


def test_schema_maps_column_names(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("Year,GDP,Money,Rate\n2020,10,5,3\n2021,11,6,4\n", encoding="utf-8")
    schema = CsvSchema({"period": "Year", "gdp_real": "GDP", "m3": "Money", "policy_rate": "Rate"}, beta=0.5)
    s = ingest_csv(p, schema)
    assert s.beta == 0.5
    assert [r.gdp_real for r in s.records] == [10.0, 11.0]


def test_empty_file(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text("", encoding="utf-8")
    with pytest.raises(ValidationError, match="no records"):
        ingest_csv(p)


def test_header_only(tmp_path):
    p = tmp_path / "h.csv"
    p.write_text("period,gdp_real,m3,policy_rate\n", encoding="utf-8")
    with pytest.raises(ValidationError, match="no records"):
        ingest_csv(p)


def test_zero_gdp_names_row(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("period,gdp_real,m3,policy_rate\n2020,10,5,3\n2021,0,6,4\n", encoding="utf-8")
    with pytest.raises(ValidationError, match="row 3"):
        ingest_csv(p)


def test_malformed_number(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("period,gdp_real,m3,policy_rate\n2020,1O,5,3\n", encoding="utf-8")
    with pytest.raises(CsvParseError, match="row 2"):
        ingest_csv(p)


def test_missing_mandatory(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("period,gdp_real,m3,policy_rate\n2020,10,,3\n", encoding="utf-8")
    with pytest.raises(ValidationError, match="row 2.*m3"):
        ingest_csv(p)


def test_duplicate_period(tmp_path):
    p = tmp_path / "dup.csv"
    p.write_text("period,gdp_real,m3,policy_rate\n2020,10,5,3\n2020,11,6,4\n", encoding="utf-8")
    with pytest.raises(DuplicatePeriodError):
        ingest_csv(p)


def test_quarter_periods_order():
    s = MacroSeries(
        (MacroRecord("2020Q4", 1, 1, 0), MacroRecord("2021Q1", 1, 1, 0), MacroRecord("2021-Q2", 1, 1, 0))
    )
    assert len(s) == 3
    with pytest.raises(ValidationError):
        MacroSeries((MacroRecord("2021Q1", 1, 1, 0), MacroRecord("2020Q4", 1, 1, 0)))


def test_shock_must_reference_period():
    recs = (MacroRecord("2020", 1, 1, 0),)
    MacroSeries(recs, shocks=(ShockAnnotation("2020", "external", "pandemic"),))
    with pytest.raises(ValidationError):
        MacroSeries(recs, shocks=(ShockAnnotation("2009", "external", "crisis"),))
    with pytest.raises(ValidationError):
        ShockAnnotation("2020", "global", "x")


class TestTTransform:
    def test_unit_levels(self):
        for beta in (0.0, 0.1, 3.0):
            assert t_transform(_series((1.0, 1.0, 0.0), beta=beta)) == [0.0]

    def test_forced_arithmetic(self):
        (t,) = t_transform(_series((math.e, math.e, 10.0), beta=0.1))
        assert t == pytest.approx(3.0, abs=1e-12)

    def test_hand_value(self):
        (t,) = t_transform(_series((60.0, 50.0, 8.0), beta=0.5))
        assert t == pytest.approx(12.0064, abs=1e-4)
        assert t == pytest.approx(math.log(60) + math.log(50) + 4.0, abs=1e-15)

    def test_order_preserving(self):
        ts = t_transform(_series((1, 1, 0), (2, 1, 0), (2, 3, 1)))
        assert len(ts) == 3 and ts[0] < ts[1] < ts[2]

    @settings(max_examples=100)
    @given(
        gdp=st.floats(0.1, 1e4),
        m3=st.floats(0.1, 1e4),
        rate=st.floats(-5, 50),
        beta=st.floats(0.001, 2),
        bump=st.floats(1.01, 10),
    )
    def test_monotone(self, gdp, m3, rate, beta, bump):
        (base,) = t_transform(_series((gdp, m3, rate), beta=beta))
        assert t_transform(_series((gdp * bump, m3, rate), beta=beta))[0] > base
        assert t_transform(_series((gdp, m3 * bump, rate), beta=beta))[0] > base
        assert t_transform(_series((gdp, m3, rate + bump), beta=beta))[0] > base


def test_index_map():
    assert index_map([12.0, 12.3, 12.7], "rank") == [1, 2, 3]
    assert index_map([12.7, 12.0, 12.3], "rank") == [3, 1, 2]
    assert index_map([5.5], "raw") == [5.5]
    with pytest.raises(ValueError):
        index_map([])
    with pytest.raises(ValueError):
        index_map([1.0], "zscore")


def test_fixture_t_rank_matches_table_index():
    series = ingest_csv(fixtures.path("macro_example.csv"))
    table = load_table(fixtures.path("table1.csv"))
    assert index_map(t_transform(series), "rank") == list(table.index)


_finite = st.floats(0.01, 1e6, allow_nan=False, allow_infinity=False)
_opt = st.none() | st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@st.composite
def macro_series(draw):
    n = draw(st.integers(1, 12))
    years = sorted(draw(st.sets(st.integers(1990, 2030), min_size=n, max_size=n)))
    quarterly = draw(st.booleans())
    recs = []
    for y in years:
        recs.append(
            MacroRecord(
                f"{y}Q{draw(st.integers(1, 4))}" if quarterly else str(y),
                draw(_finite), draw(_finite), draw(st.floats(-10, 100)),
                *(draw(_opt) for _ in range(5)),
            )
        )
    return MacroSeries(tuple(recs), beta=draw(st.floats(-1, 1)))


@settings(max_examples=50)
@given(series=macro_series())
def test_csv_round_trip(series, tmp_path_factory):
    p = tmp_path_factory.mktemp("rt") / "s.csv"
    write_csv(series, p)
    back = ingest_csv(p, CsvSchema(beta=series.beta))
    assert back == series


@settings(max_examples=50)
@given(series=macro_series())
def test_json_round_trip(series):
    assert MacroSeries.from_json(series.to_json()) == series


def test_json_file_round_trip(tmp_path):
    series = ingest_csv(fixtures.path("macro_example.csv"))
    series.to_json(tmp_path / "s.json")
    assert MacroSeries.load_json(tmp_path / "s.json") == series
