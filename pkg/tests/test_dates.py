import datetime as dt
import itertools
import re

import pytest
from hypothesis import given, strategies as st

from datasmell.dates import hypothesize, interpret, profile_column, render


def _valid(y, m, d):
    try:
        dt.date(y, m, d)
        return True
    except ValueError:
        return False


def _oracle_roles(token):
    """Brute force over slot permutations of day/month/year for a D/D/D token."""
    parts = re.split(r"[/.-]", token)
    out = set()
    for perm in itertools.permutations(("day", "month", "year")):
        yslot = perm.index("year")
        # a year may sit in the last slot, or first when written with 4 digits
        # and then only as year-month-day
        if yslot == 1 or (yslot == 0 and (len(parts[0]) != 4 or perm[1] != "month")):
            continue
        vals = dict(zip(perm, map(int, parts)))
        y = vals["year"]
        if len(parts[yslot]) == 2:
            y += 2000 if y <= 68 else 1900
        if _valid(y, vals["month"], vals["day"]):
            out.add(perm)
    return out


@pytest.mark.parametrize("token", ["03/04/05", "14/04/2005", "12/12/12", "31/01/99",
                                   "01/31/1999", "2005/04/03", "29/02/01", "29/02/04"])
def test_numeric_dates_match_brute_force(token):
    got = {tuple("year" if r.startswith("year") else r for r in h.roles) for h in hypothesize(token)}
    assert got == _oracle_roles(token)


def test_short_date_has_two_readings():
    hyps = hypothesize("03/04/05")
    assert len(hyps) >= 2
    assert {h.key for h in hyps} == {("DMY", ""), ("MDY", "")}


def test_day_over_twelve_forces_order():
    hyps = hypothesize("14/04/2005")
    assert len(hyps) == 1
    assert hyps[0].roles == ("day", "month", "year4")
    assert hyps[0].value == dt.date(2005, 4, 14)


def test_iso_timestamp_single_reading():
    hyps = hypothesize("2021-01-01 00:00:00")
    assert len(hyps) == 1
    h = hyps[0]
    assert h.signature == "nnnn-n-n HH:MM:SS"
    assert h.value == dt.datetime(2021, 1, 1)
    assert h.kind == "DateTime"


def test_clock_without_designator():
    hyps = hypothesize("08:00")
    assert {(h.clock, h.designator) for h in hyps} == {("h24", "none"), ("h12", "none")}
    assert {r.time() for h in hyps for r in h.readings()} == {dt.time(8), dt.time(20)}


@pytest.mark.parametrize("token,signature", [
    ("04-Mar-2021", "n-Mon-nnnn"),
    ("14 March 2021", "n Month nnnn"),
    ("March 12", "Month n"),
    ("Mar 12, 2021", "Mon n, nnnn"),
    ("03/04/2021 01:05 PM", "n/n/nnnn HH:MM AM"),
    ("2021-03-04T00:00:00Z", "nnnn-n-nTHH:MM:SSZ"),
    ("1:05:09 pm", "HH:MM:SS am"),
])
def test_supported_signatures(token, signature):
    hyps = hypothesize(token)
    assert hyps and hyps[0].signature == signature


@pytest.mark.parametrize("token", ["hello", "", "2021-13-01", "32/01/2020", "25:00", "12345",
                                   "Foo 12", "1.5", "99/99/99"])
def test_no_reading(token):
    assert hypothesize(token) == ()


def test_two_digit_year_pivot():
    assert hypothesize("01/02/68")[0].value.year == 2068
    assert hypothesize("01/02/69")[0].value.year == 1969


def test_profile_pins_day_first():
    p = profile_column([hypothesize("03/04/05"), hypothesize("14/04/05")])
    assert p.surviving_roles == {("DMY", "")}
    assert p.max_first_slot == 14


def test_profile_all_iso():
    p = profile_column([hypothesize(t) for t in ["2021-01-01", "2020-12-31", "1999-07-04"]])
    assert p.surviving_roles == {("YMD", "")}
    assert p.signatures == {"nnnn-n-n"}
    assert p.year_present


def test_profile_hour24_forced():
    p = profile_column([hypothesize("08:00"), hypothesize("19:30")])
    assert p.surviving_roles == {("", "h24")}
    assert not p.designator_present


def test_profile_counts_skipped_rows():
    p = profile_column([hypothesize("x"), hypothesize("2021-01-01")], counts=[3, 2])
    assert p.skipped == 3 and p.parseable == 2


def test_interpret_reasons():
    tokens = ["Mar 14", "Apr 2"]
    p = profile_column([hypothesize(t) for t in tokens])
    assert "year absent" in interpret(hypothesize("Mar 14"), p).reasons
    p = profile_column([hypothesize("08:00")])
    assert interpret(hypothesize("08:00"), p).reasons == ("no AM/PM designator",)
    p = profile_column([hypothesize("2021-01-01 00:00:00")])
    assert interpret(hypothesize("2021-01-01 00:00:00"), p).midnight


moments = st.datetimes(min_value=dt.datetime(1969, 1, 1), max_value=dt.datetime(2068, 12, 31))

FORMATS = [
    lambda t: f"{t.day}/{t.month}/{t.year}",
    lambda t: f"{t.month}/{t.day}/{t.year % 100:02d}",
    lambda t: t.strftime("%Y-%m-%d %H:%M:%S"),
    lambda t: t.strftime("%d.%m.%Y"),
    lambda t: t.strftime("%d %b %Y"),
    lambda t: t.strftime("%B %d"),
    lambda t: f"{t.hour % 12 or 12}:{t.minute:02d} {'AM' if t.hour < 12 else 'PM'}",
    lambda t: t.strftime("%H:%M"),
]


def _unpad(s):
    return re.sub(r"\b0+(\d)", r"\1", s)


@given(moments, st.sampled_from(FORMATS))
def test_every_reading_renders_back(t, fmt):
    token = fmt(t)
    hyps = hypothesize(token)
    assert hyps
    for h in hyps:
        assert _unpad(render(h)) == _unpad(token)


@given(st.lists(st.tuples(moments, st.sampled_from(FORMATS[:2])), min_size=1, max_size=8),
       st.tuples(moments, st.sampled_from(FORMATS[:2])))
def test_elimination_shrinks_and_is_sound(rows, extra):
    fmt = rows[0][1]
    tokens = [fmt(t) for t, _ in rows]
    before = profile_column([hypothesize(x) for x in tokens])
    after = profile_column([hypothesize(x) for x in tokens + [fmt(extra[0])]])
    assert after.surviving_roles <= before.surviving_roles
    if len(before.surviving_roles) == 1:
        (key,) = before.surviving_roles
        assert all(any(h.key == key for h in hypothesize(x)) for x in tokens)
