"""Acceptance gate: one group of tests per criterion.

Each test carries a ``criterion`` marker; conftest prints one PASS/FAIL line
per criterion at the end of the run.
"""

import datetime as dt
import json
import random
import subprocess
import sys
import time
from collections import Counter
from fractions import Fraction

import pytest

from datasmell import resolve_preset, scan_table
from datasmell.cli import main
from datasmell.consistency import column_cascade, groups_signature
from datasmell.dates import hypothesize, profile_column
from datasmell.ingest import BaseType, column_from_values, table_from_rows
from datasmell.model import SHIPPED_IDS, Granularity, Resources
from datasmell.report import (DEFAULT_BINS, SmellEntry, aggregate_corpus, bin_label,
                              classify_attribute, compute_density, fmt6, render_report)
from synth import N, Fixture, all_fixtures, clean_fixtures, planted_fixtures, write_csv, write_large_file

DEFAULT = resolve_preset("default")
CLI = [sys.executable, "-m", "datasmell"]


def scan_values(values, cfg=DEFAULT, res=None, quoted=None, mode="density_threshold"):
    q = None if quoted is None else [[f] for f in quoted]
    return scan_table(table_from_rows([[v] for v in values], ["c"], q), cfg, res, mode=mode)


def ids_of(report):
    return {f.smell_id for f in report.findings}


def only(report, smell_id):
    return [f for f in report.findings if f.smell_id == smell_id]


# 1 ---------------------------------------------------------------------------

C1 = (1, "seeded corpus recall 1.0, clean precision 1.0, under 30 s")


@pytest.mark.criterion(*C1)
def test_seeded_corpus_shape():
    planted = planted_fixtures(0)
    per_smell = Counter(f.smell for f in planted)
    assert set(per_smell) == set(SHIPPED_IDS)
    assert min(per_smell.values()) >= 3
    assert all(len(f.values) == N == 1000 for f in planted + clean_fixtures(0))


@pytest.mark.criterion(*C1)
def test_seeded_corpus_recall_and_precision():
    start = time.perf_counter()
    missed, noisy = [], []
    for fx in all_fixtures(0):
        report = scan_table(fx.table(), DEFAULT, fx.resources)
        found = ids_of(report)
        if fx.smell is None and found:
            noisy.append((fx.name, sorted(found)))
        if fx.smell is not None and fx.smell not in found:
            missed.append(fx.name)
    elapsed = time.perf_counter() - start
    assert missed == []
    assert noisy == []
    assert elapsed < 30, f"{elapsed:.1f}s"


# 2 ---------------------------------------------------------------------------

C2 = (2, "exemplar suite")


@pytest.mark.criterion(*C2)
def test_exemplar_dummy_age():
    ages = [str(20 + i % 50) for i in range(99)] + ["999"]
    found = only(scan_values(ages), "B-DUMMY")
    assert len(found) == 1 and found[0].samples == ((99, "999"),)


@pytest.mark.criterion(*C2)
def test_exemplar_quoted_integer():
    values = [str(i) for i in range(99)] + ["5"]
    quoted = [False] * 99 + [True]
    found = only(scan_values(values, quoted=quoted), "UE-INT-STR")
    assert [f.flagged_count for f in found] == [1]
    assert found[0].samples == ((99, "5"),)


@pytest.mark.criterion(*C2)
def test_exemplar_small_number():
    values = ["12.5", "3.75", "0.02", "8.0"]
    found = only(scan_values(values), "US-SMALL")
    assert len(found) == 1 and found[0].samples == ((2, "0.02"),)


@pytest.mark.criterion(*C2)
def test_exemplar_midnight_timestamps():
    values = [f"2021-01-{d:02d} 00:00:00" for d in range(1, 29)]
    found = only(scan_values(values), "UE-DATE-DT")
    assert len(found) == 1
    assert found[0].flagged_count == len(values)
    assert "midnight" in found[0].evidence


@pytest.mark.criterion(*C2)
def test_exemplar_clock_without_designator():
    values = ["08:00", "09:15", "11:30", "10:45", "07:05"]
    found = only(scan_values(values), "US-AMBIG-DT")
    assert len(found) == 1 and found[0].flagged_count == len(values)
    assert only(scan_values(values + ["19:30"]), "US-AMBIG-DT") == []


@pytest.mark.criterion(*C2)
def test_exemplar_year_absent():
    values = ["Mar 14", "Apr 2", "Jun 30", "Dec 1", "Jan 17"]
    found = only(scan_values(values), "US-AMBIG-DT")
    assert len(found) == 1
    assert "year absent" in found[0].evidence
    assert found[0].flagged_count == len(values)


@pytest.mark.criterion(*C2)
def test_exemplar_abbreviation():
    values = ["Doctor Hill"] * 6 + ["Dr. Hill"] * 4
    found = only(scan_values(values), "C-ABBREV")
    assert len(found) == 1 and found[0].flagged_count == 4


@pytest.mark.criterion(*C2)
def test_exemplar_casing_us():
    values = ["us"] * 97 + ["US"] * 3
    random.Random(3).shuffle(values)
    found = only(scan_values(values), "C-CASING")
    assert len(found) == 1
    assert found[0].flagged_count == 3
    assert found[0].granularity == Granularity.COLUMN


# 3 ---------------------------------------------------------------------------

C3 = (3, "density semantics")


def _entry(flagged, total, granularity=Granularity.INSTANCE):
    return SmellEntry("B-DUMMY", granularity, flagged, compute_density(flagged, total), 1, {})


@pytest.mark.criterion(*C3)
def test_density_exact_values():
    assert compute_density(12, 100) == Fraction(3, 25)
    assert fmt6(compute_density(12, 100)) == "0.120000"
    assert compute_density(0, 100) == 0
    assert classify_attribute([_entry(12, 100)], "density_threshold", 0.10) is True
    assert classify_attribute([_entry(9, 100)], "density_threshold", 0.10) is False
    assert classify_attribute([_entry(10, 100)], "density_threshold", 0.10) is True


@pytest.mark.criterion(*C3)
def test_density_any_mode_single_finding():
    assert classify_attribute([_entry(1, 100)], "any", 0.10) is True
    assert classify_attribute([_entry(1, 100)], "density", 0.10) is False
    assert classify_attribute([], "any", 0.10) is False
    assert classify_attribute([], "density", 0.10) is False


@pytest.mark.criterion(*C3)
@pytest.mark.parametrize("planted,smelly", [(12, True), (9, False)])
def test_density_end_to_end(planted, smelly):
    values = ["999"] * planted + [str(20 + i % 40) for i in range(100 - planted)]
    report = scan_values(values)
    doc = json.loads(render_report(report))
    entry = next(e for e in doc["columns"][0]["smells"] if e["smell_id"] == "B-DUMMY")
    assert entry["flagged_count"] == planted
    assert f'"density": {planted / 100:.6f}' in render_report(report).decode()
    assert report.columns[0].smelly is smelly
    # any-finding mode: one finding is enough
    assert scan_values(values, mode="any").columns[0].smelly is True


# 4 ---------------------------------------------------------------------------

C4 = (4, "determinism and row-shuffle invariance")


def _fixture_file(tmp_path, fixtures):
    path = tmp_path / "fixtures.csv"
    write_csv(path, [f.name for f in fixtures], [f.values for f in fixtures],
              [f.quoted or [False] * len(f.values) for f in fixtures])
    return path


@pytest.mark.criterion(*C4)
def test_cli_json_is_byte_identical(tmp_path):
    fixtures = [f for f in all_fixtures(0) if not f.resources.has_synonym_source]
    path = _fixture_file(tmp_path, fixtures)
    runs = [subprocess.run(CLI + ["scan", str(path), "--format", "json"], capture_output=True)
            for _ in range(2)]
    assert runs[0].returncode == runs[1].returncode == 1
    assert runs[0].stdout == runs[1].stdout
    assert len(json.loads(runs[0].stdout)["columns"]) == len(fixtures)


@pytest.mark.criterion(*C4)
def test_every_fixture_renders_identically_twice():
    for fx in all_fixtures(0):
        a = render_report(scan_table(fx.table(), DEFAULT, fx.resources))
        b = render_report(scan_table(fx.table(), DEFAULT, fx.resources))
        assert a == b, fx.name


def _column_findings(report):
    return sorted(
        (f.smell_id, f.column_index, f.flagged_count, f.evidence)
        for f in report.findings if f.granularity == Granularity.COLUMN
    )


@pytest.mark.criterion(*C4)
def test_shuffled_rows_keep_column_findings():
    rng = random.Random(11)
    checked = 0
    for fx in all_fixtures(0):
        order = list(range(len(fx.values)))
        rng.shuffle(order)
        shuffled = Fixture(fx.name, fx.smell, [fx.values[i] for i in order],
                           None if fx.quoted is None else [fx.quoted[i] for i in order],
                           fx.resources)
        a = _column_findings(scan_table(fx.table(), DEFAULT, fx.resources))
        b = _column_findings(scan_table(shuffled.table(), DEFAULT, fx.resources))
        assert a == b, fx.name
        checked += bool(a)
    assert checked >= 15


# 5 ---------------------------------------------------------------------------

C5 = (5, "preset monotonicity lenient <= default <= strict")


def _total_flags(fx, cfg):
    return sum(f.flagged_count for f in scan_table(fx.table(), cfg, fx.resources).findings)


@pytest.mark.criterion(*C5)
def test_preset_monotonicity_on_every_fixture():
    presets = [resolve_preset(p) for p in ("lenient", "default", "strict")]
    bad = []
    for fx in all_fixtures(0) + all_fixtures(1):
        lo, mid, hi = (_total_flags(fx, cfg) for cfg in presets)
        if not lo <= mid <= hi:
            bad.append((fx.name, lo, mid, hi))
    assert bad == []


# 6 ---------------------------------------------------------------------------

C6 = (6, "blocked pair search equals all-pairs oracle")


def _variant_column(rng):
    words = ["Berlin", "Bangalore Urban", "Mysore Rural", "United Nations", "Doctor Hill",
             "New York", "District 12", "district 13", "Main Street", "apple", "couch"]
    out = []
    for _ in range(rng.randint(2, 150)):
        w = rng.choice(words)
        op = rng.randrange(7)
        if op == 0 and len(w) > 3:
            i = rng.randrange(len(w))
            w = w[:i] + w[i + 1:]
        elif op == 1 and len(w) > 3:
            i = rng.randrange(len(w) - 1)
            w = w[:i] + w[i + 1] + w[i] + w[i + 2:]
        elif op == 2:
            w = w.upper() if rng.random() < 0.5 else w.lower()
        elif op == 3:
            w = " " + w.replace(" ", "  ")
        elif op == 4:
            parts = w.split()
            w = " ".join(p[0] + "." if rng.random() < 0.5 else p for p in parts)
        elif op == 5:
            w = "".join(p[0] for p in w.split()).upper()
        out.append(w)
    return out


@pytest.mark.criterion(*C6)
@pytest.mark.parametrize("preset", ["lenient", "default", "strict"])
def test_blocked_equals_exhaustive_on_fixtures(preset):
    cfg = resolve_preset(preset)
    compared = 0
    for fx in all_fixtures(0):
        col = fx.table().columns[0]
        if len(col.values) > 200 or not col.dominant_is(BaseType.TEXT):
            continue
        fast = column_cascade(col, cfg, fx.resources)
        slow = column_cascade(col, cfg, fx.resources, exhaustive=True)
        assert groups_signature(fast) == groups_signature(slow), fx.name
        compared += 1
    assert compared >= 10


@pytest.mark.criterion(*C6)
def test_blocked_equals_exhaustive_on_random_columns():
    rng = random.Random(5)
    res = Resources(thesaurus={"couch": frozenset({"sofa"}), "sofa": frozenset({"couch"})})
    nontrivial = 0
    for _ in range(120):
        values = _variant_column(rng)
        col = column_from_values(values)
        if not col.dominant_is(BaseType.TEXT):
            continue
        assert len(col.values) <= 200
        fast = column_cascade(col, DEFAULT, res)
        slow = column_cascade(col, DEFAULT, res, exhaustive=True)
        assert groups_signature(fast) == groups_signature(slow), values
        nontrivial += bool(fast.groups)
    assert nontrivial > 50


# 7 ---------------------------------------------------------------------------

C7 = (7, "date hypotheses contain the generating reading; elimination recovers it")

_MON = ["Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"]


def _h12(t):
    return f"{t.hour % 12 or 12}:{t.minute:02d} {'AM' if t.hour < 12 else 'PM'}"


# (name, renderer, generating (order, clock), value the reading must resolve to,
#  predicate telling whether a value rules out every competing reading)
SIGNATURES = [
    ("iso-date", lambda t: t.strftime("%Y-%m-%d"), ("YMD", ""),
     lambda t: t.replace(hour=0, minute=0, second=0), lambda t: True),
    ("iso-datetime", lambda t: t.strftime("%Y-%m-%d %H:%M:%S"), ("YMD", "h24"),
     lambda t: t, lambda t: True),
    ("dmy-slash", lambda t: f"{t.day}/{t.month}/{t.year}", ("DMY", ""),
     lambda t: t.replace(hour=0, minute=0, second=0), lambda t: t.day > 12),
    ("mdy-slash", lambda t: f"{t.month}/{t.day}/{t.year}", ("MDY", ""),
     lambda t: t.replace(hour=0, minute=0, second=0), lambda t: t.day > 12),
    ("dmy-dot-yy", lambda t: f"{t.day:02d}.{t.month:02d}.{t.year % 100:02d}", ("DMY", ""),
     lambda t: t.replace(hour=0, minute=0, second=0), lambda t: t.day > 12),
    ("mdy-ampm", lambda t: f"{t.month}/{t.day}/{t.year} {_h12(t)}", ("MDY", "h12"),
     lambda t: t.replace(second=0), lambda t: t.day > 12),
    ("d-mon-y", lambda t: f"{t.day} {_MON[t.month - 1]} {t.year}", ("DMY", ""),
     lambda t: t.replace(hour=0, minute=0, second=0), lambda t: True),
    ("clock-24", lambda t: f"{t.hour:02d}:{t.minute:02d}", ("", "h24"),
     lambda t: dt.datetime(2000, 1, 1, t.hour, t.minute), lambda t: t.hour > 12 or t.hour == 0),
]


def _random_moment(rng, tricky):
    day = rng.randint(1, 12) if tricky else rng.randint(1, 28)
    hour = rng.randint(1, 12) if tricky else rng.randint(0, 23)
    return dt.datetime(rng.randint(1970, 2030), rng.randint(1, 12), day, hour,
                       rng.randint(0, 59), rng.randint(0, 59))


def _moments():
    rng = random.Random(2024)
    out = []
    for k, sig in enumerate(SIGNATURES):
        for i in range(125):
            out.append((sig, _random_moment(rng, tricky=(i // 25) % 2 == 1)))
    return out


@pytest.mark.criterion(*C7)
def test_hypotheses_include_generating_reading():
    moments = _moments()
    assert len(moments) == 1000
    for (name, render, key, expect, _), t in moments:
        token = render(t)
        hyps = hypothesize(token)
        assert any(h.key == key and h.as_datetime() == expect(t) for h in hyps), (name, token)


@pytest.mark.criterion(*C7)
def test_column_elimination_recovers_generating_reading():
    moments = _moments()
    decided = undecided = 0
    for k, sig in enumerate(SIGNATURES):
        name, render, key, _, decisive = sig
        mine = [t for s, t in moments if s is sig]
        for lo in range(0, len(mine), 5):
            chunk = mine[lo:lo + 5]
            profile = profile_column([hypothesize(render(t)) for t in chunk])
            assert key in profile.surviving_roles, (name, [render(t) for t in chunk])
            if any(decisive(t) for t in chunk):
                assert profile.surviving_roles == {key}, (name, [render(t) for t in chunk])
                decided += 1
            else:
                assert len(profile.surviving_roles) > 1
                undecided += 1
    assert decided > 50 and undecided > 5


# 8 ---------------------------------------------------------------------------

C8 = (8, "1,000,000 x 10 scan under 60 s and 1 GiB")


@pytest.mark.criterion(*C8)
def test_large_file_scan(tmp_path):
    path = tmp_path / "large.csv"
    write_large_file(path, rows=1_000_000)
    out = tmp_path / "large.json"
    probe = (
        "import resource, subprocess, sys, time\n"
        "t = time.perf_counter()\n"
        "p = subprocess.run(sys.argv[1:])\n"
        "print(time.perf_counter() - t, resource.getrusage(resource.RUSAGE_CHILDREN).ru_maxrss,"
        " p.returncode)\n"
    )
    done = subprocess.run(
        [sys.executable, "-c", probe] + CLI + ["scan", str(path), "--out", str(out)],
        capture_output=True, text=True, check=True,
    )
    seconds, peak_kib, code = done.stdout.split()
    report = json.loads(out.read_text())
    assert code in ("0", "1")
    assert report["rows"] == 1_000_000 and report["column_count"] == 10
    assert float(seconds) < 60, seconds
    assert int(peak_kib) * 1024 < 1 << 30, peak_kib


# 9 ---------------------------------------------------------------------------

C9 = (9, "corpus histogram equals fold of single scans")


def _corpus_dir(tmp_path):
    fixtures = all_fixtures(0)
    plain = [f for f in fixtures if not f.resources.has_synonym_source]
    clean = [f for f in plain if f.smell is None]
    # only columns that are smelly on their own, so the bin of each file is known
    smelly = [f for f in plain if f.smell is not None
              and scan_table(f.table(), DEFAULT, f.resources).smelly_attributes == 1]
    rng = random.Random(9)
    d = tmp_path / "corpus"
    d.mkdir()
    # spread smelly-column counts over every histogram bin
    for i in range(20):
        k = [0, 1, 2, 4, 7, 12][i % 6]
        cols = rng.sample(smelly, k) + rng.sample(clean, 3)
        write_csv(d / f"ds{i:02d}.csv", [f"{f.name}_{j}" for j, f in enumerate(cols)],
                  [f.values for f in cols], [f.quoted or [False] * N for f in cols])
    return d


@pytest.mark.criterion(*C9)
def test_corpus_histogram_is_fold_of_single_scans(tmp_path, capsys):
    d = _corpus_dir(tmp_path)
    out = tmp_path / "corpus.json"
    assert main(["corpus", str(d), "--jobs", "1", "--out", str(out)]) == 1
    corpus = json.loads(out.read_text())

    singles = []
    hist = Counter()
    for path in sorted(d.glob("*.csv")):
        single = tmp_path / (path.stem + ".json")
        main(["scan", str(path), "--out", str(single)])
        doc = json.loads(single.read_text())
        singles.append(doc)
        hist[bin_label(doc["smelly_attributes"])] += 1

    got = {b["bin"]: b["datasets"] for b in corpus["histogram"]}
    assert got == {label: hist[label] for label, _, _ in DEFAULT_BINS}
    assert sum(got.values()) == 20 == corpus["dataset_count"]
    assert all(v > 0 for v in got.values())
    # per-dataset column reports agree with the single-file runs
    assert [r["columns"] for r in corpus["reports"]] == [s["columns"] for s in singles]


@pytest.mark.criterion(*C9)
def test_corpus_summary_combine_is_additive(tmp_path):
    from datasmell.cli import CliConfig, _scan_path

    d = _corpus_dir(tmp_path)
    reports = [_scan_path(str(p), CliConfig()) for p in sorted(d.glob("*.csv"))]
    whole = aggregate_corpus(reports)
    folded = aggregate_corpus(reports[:1])
    for r in reports[1:]:
        folded = folded.combine(aggregate_corpus([r]))
    assert folded.histogram == whole.histogram
    assert folded.to_csv() == whole.to_csv()
    assert sum(whole.histogram.values()) == 20
